public class LeakyScanFix {
    void drain(Cursor cursor) {
        cursor.open();
        cursor.fetch();
        cursor.dispose();
    }
}
