package registry;

public class RegistryLeak {
    void leakA(Registry reg) {
        reg.acquire();
        reg.log();
    }

    void leakB(Registry reg) {
        reg.acquire();
        reg.log();
    }
}
