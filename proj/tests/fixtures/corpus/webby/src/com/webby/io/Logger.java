package com.webby.io;

import java.io.PrintStream;

public final class Logger {
    public static final int DEBUG = 0;
    public static final int INFO = 1;
    public static final int WARN = 2;

    private static int level = INFO;
    private static PrintStream out = System.err;

    private Logger() {
    }

    public static void setLevel(int newLevel) {
        level = newLevel;
    }

    public static int getLevel() {
        return level;
    }

    public static void redirect(PrintStream stream) {
        out = stream;
    }

    public static void debug(String message) {
        print(DEBUG, "DEBUG", message);
    }

    public static void info(String message) {
        print(INFO, "INFO", message);
    }

    public static void warn(String message) {
        print(WARN, "WARN", message);
    }

    private static void print(int at, String tag, String message) {
        if (at >= level) {
            out.println("[" + tag + "] " + message);
        }
    }
}
