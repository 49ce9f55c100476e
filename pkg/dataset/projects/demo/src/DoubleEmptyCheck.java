public class DoubleEmptyCheck {
    Object first(Box box) {
        if (box.isEmpty()) {
            return null;
        }
        if (box.isEmpty()) {
            return null;
        }
        return box.take();
    }
}
