public class IdleSessionFix {
    void handle(Session session, boolean valid) {
        session.acquire();
        if (valid) {
            session.process();
        } else {
            session.discard();
        }
    }
}
