public class DoubleEmptyCheckFix {
    Object first(Box box) {
        if (box.isEmpty()) {
            return null;
        }
        return box.take();
    }
}
