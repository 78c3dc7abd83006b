package com.webby;

import java.io.IOException;

public interface RequestHandler {
    void handle(Exchange exchange) throws IOException;
}
