public class SilentChannel {
    void publish(Channel channel, boolean binary) {
        channel.attach();
        channel.detach();
    }
}
