public class SessionTouchFix {
    void refresh(Session session, Tracker tracker) {
        session.ping();
        tracker.mark();
    }
}
