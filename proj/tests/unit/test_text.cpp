#include "doctest.h"

#include "specmine/text.h"

using specmine::split_identifier;
using Words = std::vector<std::string>;

TEST_CASE("split_identifier handles camelCase, acronyms, digits and underscores") {
  CHECK(split_identifier("createContext") == Words{"create", "context"});
  CHECK(split_identifier("HTTPServer2") == Words{"http", "server", "2"});
  CHECK(split_identifier("set_response") == Words{"set", "response"});
  CHECK(split_identifier("URL") == Words{"url"});
  CHECK(split_identifier("parseURLQuery") == Words{"parse", "url", "query"});
  CHECK(split_identifier("MAX_POOL_SIZE") == Words{"max", "pool", "size"});
  CHECK(split_identifier("v1beta") == Words{"v", "1", "beta"});
  CHECK(split_identifier("").empty());
  CHECK(split_identifier("__").empty());
}

TEST_CASE("split_identifier is lowercase and loses only separators") {
  for (const char* name : {"fooBarBaz", "XMLHttpRequest", "a_b_c", "getHTTP2Port", "Q"}) {
    std::string joined;
    for (const auto& w : split_identifier(name)) {
      for (char c : w) CHECK(std::tolower(static_cast<unsigned char>(c)) == c);
      joined += w;
    }
    std::string expected;
    for (const char* p = name; *p; ++p)
      if (*p != '_') expected += static_cast<char>(std::tolower(static_cast<unsigned char>(*p)));
    CHECK(joined == expected);
  }
}

TEST_CASE("naming convention conversions") {
  CHECK(specmine::to_pascal_case("http_server") == "HttpServer");
  CHECK(specmine::to_camel_case("Remove_Context") == "removeContext");
  CHECK(specmine::to_upper_snake("maxPoolSize") == "MAX_POOL_SIZE");
  CHECK(specmine::is_pascal_case("HttpServer"));
  CHECK_FALSE(specmine::is_pascal_case("httpServer"));
  CHECK(specmine::is_camel_case("start"));
  CHECK_FALSE(specmine::is_camel_case("do_start"));
  CHECK(specmine::is_upper_snake("MAX_SIZE"));
}

TEST_CASE("quote escapes") { CHECK(specmine::quote("a\"b\\c") == "\"a\\\"b\\\\c\""); }
