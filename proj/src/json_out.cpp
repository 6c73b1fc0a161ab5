#include "cenobreak/json_out.hpp"

#include "cenobreak/csv.hpp"

namespace cenobreak {

const char* const kToolName = "cenobreak";
const char* const kToolVersion = "1.0.0";

ojson make_meta(const ojson& config, const std::string& input_sha256) {
  ojson meta;
  meta["tool"] = kToolName;
  meta["version"] = kToolVersion;
  meta["config"] = config;
  meta["input_sha256"] = input_sha256;
  return meta;
}

void write_json_file(const std::string& path, const ojson& payload) {
  atomic_write_file(path, payload.dump(2) + "\n");
}

std::string error_json(const std::string& code, const std::string& message) {
  ojson e;
  e["error"] = ojson{{"code", code}, {"message", message}};
  return e.dump();
}

}  // namespace cenobreak
