package echo;

import java.io.BufferedReader;
import java.io.IOException;
import java.io.InputStreamReader;
import java.io.PrintWriter;
import java.net.ServerSocket;
import java.net.Socket;

// Line echo over TCP. Not an http server.
public class EchoServer {
    private final int port;

    public EchoServer(int port) {
        this.port = port;
    }

    public void run() throws IOException {
        try (ServerSocket socket = new ServerSocket(port)) {
            while (true) {
                try (Socket client = socket.accept()) {
                    echo(client);
                }
            }
        }
    }

    private void echo(Socket client) throws IOException {
        BufferedReader in = new BufferedReader(new InputStreamReader(client.getInputStream()));
        PrintWriter out = new PrintWriter(client.getOutputStream(), true);
        String line;
        while ((line = in.readLine()) != null) {
            out.println(line);
        }
    }

    public static void main(String[] args) throws IOException {
        new EchoServer(args.length > 0 ? Integer.parseInt(args[0]) : 7).run();
    }
}
