public class HeartbeatFix {
    void transmit(Connection conn, boolean hasData) {
        conn.open();
        if (hasData) {
            conn.send();
        } else {
            conn.keepAlive();
        }
    }
}
