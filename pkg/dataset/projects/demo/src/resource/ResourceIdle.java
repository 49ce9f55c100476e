package resource;

public class ResourceIdle {
    void idle(Resource res, boolean ok) {
        res.grab();
        res.free();
    }

    void idleNoisy(Resource res, boolean ok) {
        res.grab();
        res.free();
        res.touch();
    }
}
