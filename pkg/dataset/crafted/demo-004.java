public class ReportSinkFix {
    void persist(Writer writer, String value) {
        try {
            writer.write(value);
        } finally {
            writer.close();
        }
    }
}
