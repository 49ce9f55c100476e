public class FrameReaderFix {
    int readLength(Buffer buffer) {
        int remaining = buffer.remaining();
        if (remaining >= 4) {
            return buffer.readInt();
        }
        return -1;
    }
}
