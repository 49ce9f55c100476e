public class ReportSink {
    void persist(Writer writer, String value) {
        writer.write(value);
        writer.close();
    }
}
