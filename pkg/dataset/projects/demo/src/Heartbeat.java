public class Heartbeat {
    void transmit(Connection conn, boolean hasData) {
        conn.open();
        conn.keepAlive();
    }
}
