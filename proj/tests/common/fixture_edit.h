#pragma once

#include <stdexcept>
#include <string>

// The developer edit applied to the merged http abstraction: removeContext
// renamed, isRunning removed, restart added.
inline std::string edit_http_abstraction(std::string text) {
  auto replace = [&](const std::string& from, const std::string& to) {
    auto at = text.find(from);
    if (at == std::string::npos) throw std::runtime_error("edit anchor missing: " + from);
    text.replace(at, from.size(), to);
  };
  replace("public abstract void removeContext(String path);", "public abstract void deleteContext(String path);");
  replace("   @AscusMember(names={\"isAlive\"})\n   public abstract boolean isRunning();\n", "");
  replace("   public abstract int getPort();\n", "   public abstract int getPort();\n   public abstract void restart();\n");
  return text;
}
