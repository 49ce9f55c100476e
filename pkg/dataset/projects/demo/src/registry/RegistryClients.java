package registry;

public class RegistryClients {
    void use00(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use01(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use02(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use03(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use04(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use05(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use06(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use07(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use08(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use09(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use10(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use11(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use12(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use13(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use14(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use15(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use16(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use17(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use18(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use19(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use20(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use21(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use22(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use23(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use24(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use25(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use26(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use27(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use28(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }

    void use29(Registry reg) {
        reg.acquire();
        reg.log();
        reg.release();
    }
}
