public class ConfigLookupFix {
    String describe(Catalog catalog, String key) {
        Entry entry = catalog.find(key);
        if (entry != null) {
            return entry.render();
        }
        return "";
    }
}
