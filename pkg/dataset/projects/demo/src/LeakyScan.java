public class LeakyScan {
    void drain(Cursor cursor) {
        cursor.open();
        cursor.fetch();
    }
}
