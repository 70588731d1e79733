#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "wsc/errors.hpp"
#include "wsc/instance.hpp"

namespace wsc {

namespace {

using nlohmann::json;

void write_cell(std::ostream& os, const CellCoord& c) { os << "[" << c.row << ", " << c.col << "]"; }

template <class T, class F>
void write_lines(std::ostream& os, const std::vector<T>& items, const char* indent, F&& write) {
  if (items.empty()) {
    os << "[]";
    return;
  }
  os << "[\n";
  for (std::size_t k = 0; k < items.size(); ++k) {
    os << indent;
    write(items[k]);
    os << (k + 1 < items.size() ? ",\n" : "\n");
  }
  os << indent + 2 << "]";
}

void write_layout(std::ostream& os, const WeakStrongLayout& l) {
  os << "{\n";
  os << "    \"grid_rows\": " << l.grid_rows << ",\n";
  os << "    \"grid_cols\": " << l.grid_cols << ",\n";
  os << "    \"lambda_num\": " << l.lambda_num << ",\n";
  os << "    \"lambda_den\": " << l.lambda_den << ",\n";
  os << "    \"pairs\": ";
  write_lines(os, l.pairs, "      ", [&](const CellPair& p) {
    os << "{\"strong\": ";
    write_cell(os, p.strong);
    os << ", \"weak\": ";
    write_cell(os, p.weak);
    os << "}";
  });
  os << ",\n    \"backbone_edges\": ";
  write_lines(os, l.backbone_edges, "      ", [&](const BackboneEdge& e) {
    os << "{\"a\": ";
    write_cell(os, e.a);
    os << ", \"b\": ";
    write_cell(os, e.b);
    os << ", \"sign\": " << e.sign << "}";
  });
  os << "\n  }";
}

// --- parsing helpers -------------------------------------------------------

const json& require(const json& obj, const char* key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(ctx + ": missing field '" + key + "'");
  return *it;
}

std::int64_t as_int(const json& v, const std::string& ctx) {
  if (!v.is_number_integer()) throw ValidationError(ctx + ": expected an integer");
  return v.get<std::int64_t>();
}

std::int32_t as_i32(const json& v, const std::string& ctx) {
  const std::int64_t x = as_int(v, ctx);
  if (x < INT32_MIN || x > INT32_MAX) throw ValidationError(ctx + ": value out of range");
  return static_cast<std::int32_t>(x);
}

SiteId as_site(const json& v, const std::string& ctx) {
  const std::int64_t x = as_int(v, ctx);
  if (x < 0 || x > UINT32_MAX) throw ValidationError(ctx + ": site id out of range");
  return static_cast<SiteId>(x);
}

CellCoord as_cell(const json& v, const std::string& ctx) {
  if (!v.is_array() || v.size() != 2) throw ValidationError(ctx + ": expected [row, col]");
  return {static_cast<int>(as_i32(v[0], ctx + "[0]")), static_cast<int>(as_i32(v[1], ctx + "[1]"))};
}

WeakStrongLayout parse_layout(const json& j) {
  const std::string ctx = "layout";
  if (!j.is_object()) throw ValidationError(ctx + ": expected an object or null");
  WeakStrongLayout l;
  l.grid_rows = as_i32(require(j, "grid_rows", ctx), ctx + ".grid_rows");
  l.grid_cols = as_i32(require(j, "grid_cols", ctx), ctx + ".grid_cols");
  l.lambda_num = as_i32(require(j, "lambda_num", ctx), ctx + ".lambda_num");
  l.lambda_den = as_i32(require(j, "lambda_den", ctx), ctx + ".lambda_den");
  const json& pairs = require(j, "pairs", ctx);
  if (!pairs.is_array()) throw ValidationError(ctx + ".pairs: expected an array");
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const std::string pc = ctx + ".pairs[" + std::to_string(k) + "]";
    l.pairs.push_back({as_cell(require(pairs[k], "strong", pc), pc + ".strong"),
                       as_cell(require(pairs[k], "weak", pc), pc + ".weak")});
  }
  const json& edges = require(j, "backbone_edges", ctx);
  if (!edges.is_array()) throw ValidationError(ctx + ".backbone_edges: expected an array");
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string ec = ctx + ".backbone_edges[" + std::to_string(k) + "]";
    l.backbone_edges.push_back({as_cell(require(edges[k], "a", ec), ec + ".a"),
                                as_cell(require(edges[k], "b", ec), ec + ".b"),
                                static_cast<int>(as_i32(require(edges[k], "sign", ec), ec + ".sign"))});
  }
  return l;
}

}  // namespace

std::string serialize_instance(const ProblemInstance& inst) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"format_version\": " << kInstanceFormatVersion << ",\n";
  os << "  \"n\": " << inst.n() << ",\n";
  os << "  \"scale\": " << inst.scale() << ",\n";
  os << "  \"fields\": ";
  write_lines(os, inst.fields(), "    ",
              [&](const FieldTerm& f) { os << "[" << f.site << ", " << f.value << "]"; });
  os << ",\n  \"couplings\": ";
  write_lines(os, inst.couplings(), "    ", [&](const Coupling& c) {
    os << "[" << c.i << ", " << c.j << ", " << c.value << "]";
  });
  os << ",\n  \"layout\": ";
  if (inst.layout())
    write_layout(os, *inst.layout());
  else
    os << "null";
  os << ",\n  \"reference_energy_scaled\": ";
  if (inst.reference_energy())
    os << *inst.reference_energy();
  else
    os << "null";
  os << ",\n  \"reference_method\": \"" << to_string(inst.reference_method()) << "\"\n";
  os << "}\n";
  return os.str();
}

ProblemInstance parse_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line number for the message.
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
    throw ValidationError("instance: malformed JSON near line " + std::to_string(line) + ": " +
                          e.what());
  }
  if (!doc.is_object()) throw ValidationError("instance: top level must be an object");
  const std::string ctx = "instance";
  const std::int64_t version = as_int(require(doc, "format_version", ctx), "format_version");
  if (version != kInstanceFormatVersion)
    throw ValidationError("format_version: unsupported version " + std::to_string(version));
  const std::int64_t n = as_int(require(doc, "n", ctx), "n");
  if (n < 0) throw ValidationError("n: must be non-negative");

  int scale = kDefaultScale;
  bool defaulted = true;
  if (auto it = doc.find("scale"); it != doc.end() && !it->is_null()) {
    scale = as_i32(*it, "scale");
    defaulted = false;
  }

  std::vector<FieldTerm> fields;
  const json& jf = require(doc, "fields", ctx);
  if (!jf.is_array()) throw ValidationError("fields: expected an array");
  for (std::size_t k = 0; k < jf.size(); ++k) {
    const std::string fc = "fields[" + std::to_string(k) + "]";
    if (!jf[k].is_array() || jf[k].size() != 2) throw ValidationError(fc + ": expected [site, h]");
    fields.push_back({as_site(jf[k][0], fc + "[0]"), as_i32(jf[k][1], fc + "[1]")});
  }
  std::vector<Coupling> couplings;
  const json& jc = require(doc, "couplings", ctx);
  if (!jc.is_array()) throw ValidationError("couplings: expected an array");
  for (std::size_t k = 0; k < jc.size(); ++k) {
    const std::string cc = "couplings[" + std::to_string(k) + "]";
    if (!jc[k].is_array() || jc[k].size() != 3) throw ValidationError(cc + ": expected [i, j, J]");
    couplings.push_back(
        {as_site(jc[k][0], cc + "[0]"), as_site(jc[k][1], cc + "[1]"), as_i32(jc[k][2], cc + "[2]")});
  }

  ProblemInstance inst =
      ProblemInstance::create(static_cast<std::size_t>(n), std::move(couplings), std::move(fields), scale);
  inst.mark_scale_defaulted(defaulted);
  if (auto it = doc.find("layout"); it != doc.end() && !it->is_null()) inst.set_layout(parse_layout(*it));

  ReferenceMethod method = ReferenceMethod::none;
  if (auto it = doc.find("reference_method"); it != doc.end() && !it->is_null()) {
    if (!it->is_string()) throw ValidationError("reference_method: expected a string");
    method = parse_reference_method(it->get<std::string>());
  }
  if (auto it = doc.find("reference_energy_scaled"); it != doc.end() && !it->is_null()) {
    const Energy e = as_int(*it, "reference_energy_scaled");
    if (method == ReferenceMethod::none)
      throw ValidationError("reference_method: required when reference_energy_scaled is set");
    inst.set_reference(e, method);
  } else if (method != ReferenceMethod::none) {
    throw ValidationError("reference_energy_scaled: missing for reference_method '" +
                          std::string(to_string(method)) + "'");
  }
  return inst;
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open instance file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_instance(buf.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void save_instance(const ProblemInstance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write instance file '" + path + "'");
  out << serialize_instance(inst);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace wsc
