public class IdleSession {
    void handle(Session session, boolean valid) {
        session.acquire();
        session.discard();
    }
}
