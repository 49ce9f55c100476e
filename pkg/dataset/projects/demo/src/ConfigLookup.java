public class ConfigLookup {
    String describe(Catalog catalog, String key) {
        Entry entry = catalog.find(key);
        return entry.render();
    }
}
