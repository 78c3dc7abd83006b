package org.tinyhttp.core;

import java.io.IOException;
import java.io.InputStream;
import java.io.OutputStream;
import java.net.Socket;

import org.tinyhttp.protocol.HttpExchange;
import org.tinyhttp.protocol.RequestParser;
import org.tinyhttp.protocol.StatusCodes;
import org.tinyhttp.util.Log;

/**
 * Turns accepted connections into exchanges and runs the matching
 * context's filter chain.
 */
class Dispatcher {
    private final HttpServer server;
    private long handled;

    Dispatcher(HttpServer server) {
        this.server = server;
    }

    HttpExchange read(Socket client) throws IOException {
        InputStream in = client.getInputStream();
        OutputStream out = client.getOutputStream();
        RequestParser parser = new RequestParser(in);
        if (!parser.parse()) {
            return null;
        }
        HttpContext context = server.findContext(parser.getPath());
        HttpExchange exchange = new HttpExchange(parser.getMethod(), parser.getUri(), parser.getHeaders(),
                parser.getBody(), out);
        exchange.setContext(context);
        exchange.setRemoteAddress(client.getRemoteSocketAddress().toString());
        return exchange;
    }

    void dispatch(HttpExchange exchange) throws IOException {
        handled++;
        HttpContext context = exchange.getHttpContext();
        if (context == null || context.getHandler() == null) {
            exchange.sendResponseHeaders(StatusCodes.NOT_FOUND, -1);
            exchange.close();
            return;
        }
        Authenticator auth = context.getAuthenticator();
        if (auth != null && !auth.authenticate(exchange)) {
            exchange.sendResponseHeaders(StatusCodes.UNAUTHORIZED, -1);
            exchange.close();
            return;
        }
        try {
            new Filter.Chain(context.getFilters(), context.getHandler()).doFilter(exchange);
        } catch (RuntimeException e) {
            Log.warn("handler for " + context.getPath() + " failed: " + e);
            if (!exchange.responseStarted()) {
                exchange.sendResponseHeaders(StatusCodes.INTERNAL_ERROR, -1);
            }
        } finally {
            exchange.close();
        }
    }

    long handledCount() {
        return handled;
    }
}
