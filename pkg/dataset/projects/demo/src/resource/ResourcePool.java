package resource;

public class ResourcePool {
    void grant00(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant01(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant02(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant03(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant04(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant05(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant06(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant07(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant08(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant09(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant10(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant11(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant12(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant13(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant14(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant15(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant16(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant17(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant18(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant19(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant20(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant21(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant22(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant23(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant24(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant25(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant26(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant27(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant28(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }

    void grant29(Resource res, boolean ok) {
        res.grab();
        if (ok) {
            res.use();
        } else {
            res.free();
        }
    }
}
