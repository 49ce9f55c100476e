public class CacheWarmup {
    void prime(Cache cache) {
        cache.connect();
        cache.preload();
        cache.connect();
    }
}
