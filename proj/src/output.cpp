#include "dagforge/output.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include "dagforge/errors.hpp"

namespace dagforge {

namespace fs = std::filesystem;

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

bool valid_stratum(std::string_view label) {
  if (label.empty()) return false;
  for (unsigned char c : label) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  if (!dir.empty()) fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string header_line(const Dataset& ds) {
  std::string line;
  for (std::size_t i = 0; i < ds.column_order.size(); ++i) {
    if (i) line += ',';
    line += csv_field(ds.column_order[i]);
  }
  return line + '\n';
}

void append_row(std::string& out, const SampleRow& row, const std::vector<std::size_t>& cols) {
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += csv_field(csv_cell(row.values[cols[i]]));
  }
  out += '\n';
}

}  // namespace

std::vector<fs::path> write_csv(const Dataset& ds, const CompiledModel& model,
                                const SimInstructions& instructions, const fs::path& out_dir) {
  const auto cols = ds.column_indices();
  const std::string header = header_line(ds);

  if (!model.stratify) {
    ensure_dir(out_dir);
    std::string body = header;
    for (const auto& row : ds.rows) append_row(body, row, cols);
    const fs::path path = out_dir / (instructions.csv_name + ".csv");
    write_file(path, body);
    return {path};
  }

  std::map<std::string, std::string> files;
  for (const auto& row : ds.rows) {
    const std::string label = row.stratum.value_or("");
    if (!valid_stratum(label))
      throw StratumNameError("stratum label '" + label +
                             "' must be non-empty and use only [A-Za-z0-9_-]");
    auto [it, fresh] = files.try_emplace(label, header);
    append_row(it->second, row, cols);
  }
  ensure_dir(out_dir);
  std::vector<fs::path> paths;
  for (const auto& [label, body] : files) {
    const fs::path path = out_dir / (instructions.csv_name + "_" + label + ".csv");
    write_file(path, body);
    paths.push_back(path);
  }
  return paths;
}

std::string manifest_text(const Dataset& ds, const CompiledModel& model, const RunConfig& config,
                          const std::vector<fs::path>& paths, std::string_view timestamp) {
  std::ostringstream os;
  os << "engine=dagforge\n";
  os << "engine_version=" << kEngineVersion << "\n";
  os << "model_hash=" << model_hash(model) << "\n";
  os << "seed=" << config.seed << "\n";
  os << "num_samples=" << config.num_samples << "\n";
  os << "attempts=" << ds.attempts << "\n";
  os << "max_rejection_factor=" << config.max_rejection_factor << "\n";
  os << "interventions=";
  for (std::size_t i = 0; i < config.interventions.size(); ++i) {
    const auto& [target, expr] = config.interventions[i];
    std::string text;
    try {
      text = pretty_print(*expr);
    } catch (const std::exception&) {
      text = "<host value>";
    }
    os << (i ? ";" : "") << target << ":=" << text;
  }
  os << "\n";
  os << "files=";
  for (std::size_t i = 0; i < paths.size(); ++i) os << (i ? "," : "") << paths[i].filename().string();
  os << "\n";
  os << "timestamp=" << timestamp << "\n";
  return os.str();
}

fs::path write_manifest(const Dataset& ds, const CompiledModel& model, const RunConfig& config,
                        const SimInstructions& instructions, const std::vector<fs::path>& paths,
                        const fs::path& out_dir) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
  ensure_dir(out_dir);
  const fs::path path = out_dir / (instructions.csv_name + ".manifest");
  write_file(path, manifest_text(ds, model, config, paths, stamp));
  return path;
}

}  // namespace dagforge
