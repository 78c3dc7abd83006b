package net.miniftp;

import java.util.Locale;

/**
 * A parsed ftp request line: a verb and an optional argument.
 */
public final class Command {
    private final String verb;
    private final String argument;

    private Command(String verb, String argument) {
        this.verb = verb;
        this.argument = argument;
    }

    public static Command parse(String line) {
        String trimmed = line.trim();
        int space = trimmed.indexOf(' ');
        if (space < 0) {
            return new Command(trimmed.toUpperCase(Locale.ROOT), "");
        }
        return new Command(trimmed.substring(0, space).toUpperCase(Locale.ROOT), trimmed.substring(space + 1).trim());
    }

    public String getVerb() {
        return verb;
    }

    public String getArgument() {
        return argument;
    }

    public boolean hasArgument() {
        return !argument.isEmpty();
    }

    @Override
    public String toString() {
        return argument.isEmpty() ? verb : verb + " " + argument;
    }
}
