public class SilentChannelFix {
    void publish(Channel channel, boolean binary) {
        channel.attach();
        if (binary) {
            channel.stream();
        } else {
            channel.detach();
        }
    }
}
