public class SessionTouch {
    void refresh(Session session, Tracker tracker) {
        session.ping();
        if (session != null) {
            tracker.mark();
        }
    }
}
