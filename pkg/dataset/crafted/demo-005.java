public class CacheWarmupFix {
    void prime(Cache cache) {
        cache.connect();
        cache.preload();
    }
}
