public class FrameReader {
    int readLength(Buffer buffer) {
        int remaining = buffer.remaining();
        return buffer.readInt();
    }
}
