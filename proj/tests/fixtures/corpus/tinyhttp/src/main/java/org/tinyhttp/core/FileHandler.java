package org.tinyhttp.core;

import java.io.File;
import java.io.FileInputStream;
import java.io.IOException;
import java.io.InputStream;
import java.util.HashMap;
import java.util.Map;

import org.tinyhttp.protocol.HttpExchange;
import org.tinyhttp.protocol.StatusCodes;
import org.tinyhttp.util.IoUtils;
import org.tinyhttp.util.UrlUtils;

/**
 * Serves files below a root directory.
 */
public class FileHandler implements HttpHandler {
    private static final Map<String, String> TYPES = new HashMap<>();

    static {
        TYPES.put("html", "text/html");
        TYPES.put("css", "text/css");
        TYPES.put("js", "application/javascript");
        TYPES.put("png", "image/png");
        TYPES.put("txt", "text/plain");
    }

    private final File root;
    private boolean listDirectories;

    public FileHandler(File root) {
        this.root = root;
    }

    public void setListDirectories(boolean listDirectories) {
        this.listDirectories = listDirectories;
    }

    @Override
    public void handle(HttpExchange exchange) throws IOException {
        if (!"GET".equals(exchange.getRequestMethod()) && !"HEAD".equals(exchange.getRequestMethod())) {
            exchange.sendResponseHeaders(StatusCodes.NOT_ALLOWED, -1);
            return;
        }
        String rel = exchange.getHttpContext().relativePath(exchange.getRequestURI().getPath());
        File file = new File(root, UrlUtils.decode(rel));
        if (!file.getCanonicalPath().startsWith(root.getCanonicalPath())) {
            exchange.sendResponseHeaders(StatusCodes.FORBIDDEN, -1);
            return;
        }
        if (file.isDirectory()) {
            if (listDirectories) {
                exchange.respond(StatusCodes.OK, listing(file));
            } else {
                exchange.sendResponseHeaders(StatusCodes.FORBIDDEN, -1);
            }
            return;
        }
        if (!file.isFile()) {
            exchange.sendResponseHeaders(StatusCodes.NOT_FOUND, -1);
            return;
        }
        exchange.getResponseHeaders().set("Content-Type", contentType(file.getName()));
        exchange.sendResponseHeaders(StatusCodes.OK, file.length());
        try (InputStream in = new FileInputStream(file)) {
            IoUtils.copy(in, exchange.getResponseBody());
        }
    }

    static String contentType(String name) {
        int dot = name.lastIndexOf('.');
        String type = dot < 0 ? null : TYPES.get(name.substring(dot + 1).toLowerCase());
        return type == null ? "application/octet-stream" : type;
    }

    private String listing(File dir) {
        StringBuilder sb = new StringBuilder();
        String[] names = dir.list();
        if (names != null) {
            java.util.Arrays.sort(names);
            for (String n : names) {
                sb.append(n).append('\n');
            }
        }
        return sb.toString();
    }
}
