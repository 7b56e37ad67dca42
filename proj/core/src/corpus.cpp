// SPDX-License-Identifier: Apache-2.0

#include "diffsense/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <nlohmann/json.hpp>
#include <random>
#include <set>

#include "diffsense/artifact_json.hpp"
#include "diffsense/hash.hpp"
#include "diffsense/ingest.hpp"
#include "diffsense/io.hpp"

namespace diffsense::corpus {

namespace {

using Rng = std::mt19937_64;

// std::uniform_int_distribution is implementation-defined; plain modulo keeps
// corpora identical across standard libraries.
std::size_t pick(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

constexpr int kPayloadUidBase = 100000;

struct Line {
  Line(std::string t, int c = -1, std::string ext = {})
      : text(std::move(t)), callee(c), external(std::move(ext)) {}

  std::string text;       // '@' stands for the callee's name
  int callee;
  std::string external;   // library function called on this line, if any
};

struct Func {
  int uid = 0;
  std::string ret;
  std::string params;
  std::vector<std::string> decls;
  std::vector<Line> lines;
  std::string ret_expr;
  std::uint32_t address = 0;
};

struct Program {
  std::map<int, Func> funcs;
  int next_uid = 0;
  std::uint32_t next_address = 0x00101000;
};

struct ProjectInfo {
  const char* name;
  const char* description;
};

constexpr ProjectInfo kProjects[] = {
    {"tinyhttpd", "Lightweight embedded HTTP server library"},
    {"mqlite", "Small publish/subscribe messaging client library for constrained devices"},
    {"ziptool", "Command-line archive compression utility"},
    {"imgconv", "Image format conversion library"},
    {"jsonkit", "Streaming JSON parser library"},
    {"tarx", "Tape archive creation and extraction tool"},
};

constexpr const char* kWords[] = {"entries", "config", "parsed", "bytes",
                                  "records", "checksum", "offset", "header"};

std::string hex(std::uint32_t v, int width = 0) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%0*x", width, v);
  return buf;
}

std::string name_of(const Func& f) { return "FUN_" + hex(f.address, 8); }

std::uint32_t func_size(const Func& f) {
  return static_cast<std::uint32_t>(0x20 * (f.lines.size() + f.decls.size() + 4));
}

Line benign_line(Rng& rng) {
  switch (pick(rng, 10)) {
    case 0: return {"local_18 = param_1 + 0x" + hex(0x8 + 8 * pick(rng, 32)) + ";"};
    case 1:
      return {"iVar1 = iVar1 * " + std::to_string(2 + pick(rng, 9)) + " + " +
              std::to_string(pick(rng, 100)) + ";"};
    case 2: return {"sVar2 = strlen((char *)param_1);", -1, "strlen"};
    case 3:
      return {"memcpy(local_48,(void *)param_1,0x" + hex(0x10 + 0x10 * pick(rng, 2)) + ");", -1,
              "memcpy"};
    case 4:
      return {"if (iVar1 < " + std::to_string(pick(rng, 64)) + ") {\n    iVar1 = " +
              std::to_string(pick(rng, 16)) + ";\n  }"};
    case 5:
      return {std::string("printf(\"") + kWords[pick(rng, std::size(kWords))] +
                  ": %d\\n\",iVar1);",
              -1, "printf"};
    case 6: return {"pvVar3 = malloc(0x" + hex(0x20 * (1 + pick(rng, 16))) + ");", -1, "malloc"};
    case 7: return {"free(pvVar3);", -1, "free"};
    case 8:
      return {"local_18 = strtol(local_48,(char **)0x0," + std::string(pick(rng, 2) ? "10" : "16") +
                  ");",
              -1, "strtol"};
    default:
      return {"iVar1 = memcmp(local_48,(void *)param_1,0x" + hex(0x4 + 4 * pick(rng, 8)) + ");",
              -1, "memcmp"};
  }
}

Line call_line(Rng& rng, int callee) {
  switch (pick(rng, 3)) {
    case 0: return {"iVar1 = @(local_18,iVar1);", callee};
    case 1: return {"@(pvVar3);", callee};
    default: return {"local_18 = @(param_1," + std::to_string(pick(rng, 32)) + ");", callee};
  }
}

Func new_benign_func(Rng& rng, int uid, std::size_t n_lines) {
  static constexpr const char* kRet[] = {"undefined8", "int", "long"};
  static constexpr const char* kParams[] = {"long param_1,int param_2", "long param_1",
                                            "char *param_1,long param_2"};
  static constexpr const char* kRetExpr[] = {"0", "iVar1", "local_18"};
  Func f;
  f.uid = uid;
  auto r = pick(rng, 3);
  f.ret = kRet[r];
  f.ret_expr = kRetExpr[r];
  f.params = kParams[pick(rng, 3)];
  f.decls = {"int iVar1", "size_t sVar2", "void *pvVar3", "long local_18", "char local_48 [32]"};
  for (std::size_t i = 0; i < n_lines; ++i) f.lines.push_back(benign_line(rng));
  return f;
}

void place(Program& p, Func& f) {
  f.address = p.next_address;
  p.next_address += func_size(f);
}

std::string render(const Func& f, const Program& p) {
  std::string out = f.ret + " " + name_of(f) + "(" + f.params + ")\n\n{\n";
  for (const auto& d : f.decls) out += "  " + d + ";\n";
  out += "\n";
  for (const auto& line : f.lines) {
    std::string text = line.text;
    if (line.callee >= 0) {
      auto at = text.find('@');
      text.replace(at, 1, name_of(p.funcs.at(line.callee)));
    }
    out += "  " + text + "\n";
  }
  out += "  return " + f.ret_expr + ";\n}\n";
  return out;
}

std::vector<std::string> callees_of(const Func& f, const Program& p) {
  std::vector<std::string> out;
  for (const auto& line : f.lines) {
    std::string name = line.callee >= 0 ? name_of(p.funcs.at(line.callee)) : line.external;
    if (!name.empty() && std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  }
  return out;
}

Program initial_program(Rng& rng) {
  Program p;
  std::size_t n = 10 + pick(rng, 7);
  for (std::size_t i = 0; i < n; ++i) {
    int uid = p.next_uid++;
    p.funcs.emplace(uid, new_benign_func(rng, uid, 4 + pick(rng, 6)));
  }
  // Calls mostly go to higher uids; the occasional back edge gives recursion.
  for (auto& [uid, f] : p.funcs) {
    std::size_t n_calls = pick(rng, 3);
    for (std::size_t c = 0; c < n_calls; ++c) {
      int target;
      if (pick(rng, 8) == 0 && uid > 0) {
        target = static_cast<int>(pick(rng, static_cast<std::size_t>(uid)));
      } else if (uid + 1 < static_cast<int>(n)) {
        target = uid + 1 + static_cast<int>(pick(rng, n - static_cast<std::size_t>(uid) - 1));
      } else {
        continue;
      }
      auto pos = pick(rng, f.lines.size() + 1);
      f.lines.insert(f.lines.begin() + static_cast<std::ptrdiff_t>(pos), call_line(rng, target));
    }
  }
  for (auto& [uid, f] : p.funcs) place(p, f);
  return p;
}

struct Evolution {
  Program next;
  std::string changelog;
};

Evolution evolve(const Program& old, Rng& rng, const std::string& version) {
  Evolution ev{old, "Version " + version + "\n"};
  Program& p = ev.next;
  std::set<int> edited;

  std::vector<int> uids;
  for (const auto& [uid, f] : p.funcs) uids.push_back(uid);

  std::size_t n_edits = std::min<std::size_t>(2 + pick(rng, 3), uids.size());
  for (std::size_t e = 0; e < n_edits; ++e) {
    int uid = uids[pick(rng, uids.size())];
    Func& f = p.funcs.at(uid);
    std::vector<std::size_t> plain;
    for (std::size_t i = 0; i < f.lines.size(); ++i) {
      if (f.lines[i].callee < 0) plain.push_back(i);
    }
    if (!plain.empty() && pick(rng, 2) == 0) {
      f.lines[plain[pick(rng, plain.size())]] = benign_line(rng);
    } else {
      auto pos = pick(rng, f.lines.size() + 1);
      f.lines.insert(f.lines.begin() + static_cast<std::ptrdiff_t>(pos), benign_line(rng));
    }
    if (edited.insert(uid).second) {
      ev.changelog += std::string("- Adjust ") + kWords[pick(rng, std::size(kWords))] +
                      " handling\n";
    }
  }

  std::size_t n_helpers = 1 + pick(rng, 2);
  for (std::size_t h = 0; h < n_helpers; ++h) {
    int uid = p.next_uid++;
    Func helper = new_benign_func(rng, uid, 3 + pick(rng, 4));
    place(p, helper);
    int caller = uids[pick(rng, uids.size())];
    Func& c = p.funcs.at(caller);
    auto pos = pick(rng, c.lines.size() + 1);
    c.lines.insert(c.lines.begin() + static_cast<std::ptrdiff_t>(pos), call_line(rng, uid));
    edited.insert(caller);
    p.funcs.emplace(uid, std::move(helper));
    ev.changelog += "- Add internal helper for " + std::string(kWords[pick(rng, std::size(kWords))]) +
                    "\n";
  }

  if (uids.size() > 8 && pick(rng, 2) == 0) {
    int victim = uids[1 + pick(rng, uids.size() - 1)];
    p.funcs.erase(victim);
    edited.erase(victim);
    for (auto& [uid, f] : p.funcs) {
      auto before = f.lines.size();
      std::erase_if(f.lines, [&](const Line& l) { return l.callee == victim; });
      if (f.lines.size() != before) edited.insert(uid);
    }
    ev.changelog += "- Remove unused routine\n";
  }

  for (int uid : edited) {
    auto it = p.funcs.find(uid);
    if (it != p.funcs.end()) place(p, it->second);
  }
  return ev;
}

struct PayloadTemplate {
  std::vector<std::vector<Line>> bodies;  // [0] is the entry point
};

std::vector<Line> lines(std::initializer_list<std::pair<const char*, const char*>> items) {
  std::vector<Line> out;
  for (auto [text, ext] : items) out.push_back({text, -1, ext ? ext : ""});
  return out;
}

PayloadTemplate payload_family(std::size_t family) {
  switch (family) {
    case 0:  // reverse shell
      return {{
          lines({{"pcVar4 = getenv(\"UPDATE_HOST\");", "getenv"},
                 {"_Var2 = fork();", "fork"},
                 {"iVar1 = socket(2,1,0);", "socket"},
                 {"connect(iVar1,(sockaddr *)&local_28,0x10);", "connect"},
                 {"dup2(iVar1,0);", "dup2"}}),
          lines({{"dup2(param_1,1);", "dup2"},
                 {"dup2(param_1,2);", nullptr},
                 {"local_48 = \"/bin/sh\";", nullptr},
                 {"execve(local_48,&local_48,(char **)0x0);", "execve"}}),
          lines({{"_Var2 = fork();", "fork"}, {"unlink((char *)param_1);", "unlink"}}),
      }};
    case 1:  // file encryptor
      return {{
          lines({{"pDVar3 = opendir(\"/home\");", "opendir"},
                 {"pdVar5 = readdir(pDVar3);", "readdir"},
                 {"unlink(local_148);", "unlink"}}),
          lines({{"pcVar4 = getenv(\"HOME\");", "getenv"},
                 {"AES_set_encrypt_key(local_68,0x100,&local_168);", "AES_set_encrypt_key"},
                 {"AES_encrypt(local_48,local_48,&local_168);", "AES_encrypt"},
                 {"unlink((char *)param_1);", "unlink"}}),
          lines({{"iVar1 = socket(2,2,0);", "socket"},
                 {"sendto(iVar1,local_68,0x20,0,(sockaddr *)&local_28,0x10);", "sendto"}}),
      }};
    default:  // flooding bot
      return {{
          lines({{"iVar1 = socket(2,1,0);", "socket"},
                 {"connect(iVar1,(sockaddr *)&local_28,0x10);", "connect"},
                 {"sendto(iVar1,\"ping\",4,0,(sockaddr *)0x0,0);", "sendto"}}),
          lines({{"iVar1 = socket(2,2,0x11);", "socket"},
                 {"sendto(iVar1,pvVar3,param_2,0,(sockaddr *)&local_28,0x10);", "sendto"}}),
          lines({{"iVar1 = socket(2,1,0);", "socket"},
                 {"connect(iVar1,(sockaddr *)&local_28,0x10);", "connect"},
                 {"unlink(\"/tmp/.lock\");", "unlink"}}),
      }};
  }
}

Program inject(const Program& old, const Program& clean, Rng& rng, std::uint32_t address_base) {
  Program p = clean;
  p.next_address = address_base;

  auto tmpl = payload_family(pick(rng, 3));
  std::size_t count = 1 + pick(rng, 3);
  std::vector<int> payload;
  for (std::size_t i = 0; i < count; ++i) {
    Func f;
    f.uid = kPayloadUidBase + static_cast<int>(i);
    f.ret = "undefined8";
    f.params = "long param_1,int param_2";
    f.decls = {"int iVar1", "__pid_t _Var2", "void *pvVar3", "char *pcVar4",
               "sockaddr local_28", "char *local_48"};
    f.lines = tmpl.bodies[i];
    f.ret_expr = "0";
    payload.push_back(f.uid);
    p.funcs.emplace(f.uid, std::move(f));
  }
  Func& entry = p.funcs.at(payload.front());
  for (std::size_t i = 1; i < payload.size(); ++i) {
    entry.lines.push_back({"@(iVar1);", payload[i]});
  }
  for (int uid : payload) place(p, p.funcs.at(uid));

  std::vector<int> shared;
  for (const auto& [uid, f] : clean.funcs) {
    if (old.funcs.contains(uid)) shared.push_back(uid);
  }
  Func& trigger = p.funcs.at(shared[pick(rng, shared.size())]);
  auto pos = pick(rng, trigger.lines.size() + 1);
  trigger.lines.insert(trigger.lines.begin() + static_cast<std::ptrdiff_t>(pos),
                       {"@(param_1);", payload.front()});
  place(p, trigger);
  return p;
}

BinaryMeta meta_for(const ProjectInfo& info, const std::string& name, const std::string& version,
                    std::string_view variant, std::optional<std::string> changelog) {
  BinaryMeta m;
  m.name = name;
  m.version = version;
  m.content_hash = sha256_hex(name + "@" + version + "/" + std::string(variant));
  m.project_description = info.description;
  m.changelog = std::move(changelog);
  return m;
}

DiffArtifact diff_programs(const Program& old, const Program& next) {
  DiffArtifact a;
  std::set<int> uids;
  for (const auto& [uid, f] : old.funcs) uids.insert(uid);
  for (const auto& [uid, f] : next.funcs) uids.insert(uid);
  bool injected = false;
  std::map<std::string, Label> labels;

  for (int uid : uids) {
    auto o = old.funcs.find(uid);
    auto n = next.funcs.find(uid);
    FunctionRecord r;
    if (n == next.funcs.end()) {
      r.kind = FunctionKind::Deleted;
      r.id.old_address = hex(o->second.address, 8);
      r.id.display_name = name_of(o->second);
      r.code_old = render(o->second, old);
      r.callees = callees_of(o->second, old);
    } else if (o == old.funcs.end()) {
      r.kind = FunctionKind::Added;
      r.id.new_address = hex(n->second.address, 8);
      r.id.display_name = name_of(n->second);
      r.code_new = render(n->second, next);
      r.callees = callees_of(n->second, next);
    } else {
      std::string before = render(o->second, old);
      std::string after = render(n->second, next);
      if (before == after) continue;
      r.kind = FunctionKind::Modified;
      r.id.old_address = hex(o->second.address, 8);
      r.id.new_address = hex(n->second.address, 8);
      r.id.display_name = name_of(o->second);
      r.code_old = std::move(before);
      r.code_new = std::move(after);
      r.callees = callees_of(n->second, next);
    }
    bool malicious = uid >= kPayloadUidBase;
    injected = injected || malicious;
    labels.emplace(r.id.display_name, malicious ? Label::Malicious : Label::Benign);
    a.functions.push_back(std::move(r));
  }
  a.label = injected ? Label::Malicious : Label::Benign;
  a.function_labels = std::move(labels);
  return a;
}

std::string version_string(std::size_t v) { return "1." + std::to_string(v) + ".0"; }

}  // namespace

std::vector<CorpusEntry> generate(const CorpusSpec& spec) {
  if (spec.projects == 0 || spec.versions == 0) throw ConfigError("projects and versions must be >= 1");
  if (!(spec.inject_rate >= 0.0 && spec.inject_rate <= 1.0))
    throw ConfigError("inject rate must be in [0, 1]");

  Rng rng(spec.seed);
  const std::size_t pairs = spec.versions - 1;
  const std::size_t slots = spec.projects * pairs;
  const auto n_injected =
      std::min<std::size_t>(slots, static_cast<std::size_t>(std::llround(spec.inject_rate * slots)));
  std::vector<std::size_t> order(slots);
  for (std::size_t i = 0; i < slots; ++i) order[i] = i;
  for (std::size_t i = slots; i > 1; --i) std::swap(order[i - 1], order[pick(rng, i)]);
  std::set<std::size_t> injected_slots(order.begin(),
                                       order.begin() + static_cast<std::ptrdiff_t>(n_injected));

  std::vector<CorpusEntry> out;
  for (std::size_t proj = 0; proj < spec.projects; ++proj) {
    const ProjectInfo& info = kProjects[proj % std::size(kProjects)];
    std::string name = info.name;
    if (proj >= std::size(kProjects)) name += std::to_string(proj / std::size(kProjects) + 1);

    Program current = initial_program(rng);
    for (std::size_t v = 0; v < pairs; ++v) {
      std::string old_ver = version_string(v);
      std::string new_ver = version_string(v + 1);
      Evolution ev = evolve(current, rng, new_ver);
      BinaryMeta old_meta = meta_for(info, name, old_ver, "clean", std::nullopt);
      std::string base_id = name + "-" + old_ver + "-" + new_ver;

      DiffArtifact clean = diff_programs(current, ev.next);
      clean.old_binary = old_meta;
      clean.new_binary = meta_for(info, name, new_ver, "clean", ev.changelog);
      out.push_back({base_id + "-clean", std::move(clean)});

      if (injected_slots.contains(proj * pairs + v)) {
        auto base = static_cast<std::uint32_t>(0x00400000 + proj * 0x10000 + v * 0x1000);
        Program bad = inject(current, ev.next, rng, base);
        DiffArtifact inj = diff_programs(current, bad);
        inj.old_binary = old_meta;
        inj.new_binary = meta_for(info, name, new_ver, "injected", ev.changelog);
        out.push_back({base_id + "-injected", std::move(inj)});
      }
      current = std::move(ev.next);
    }
  }
  return out;
}

std::string manifest_json(const std::vector<ManifestRow>& rows) {
  nlohmann::ordered_json root;
  root["schema_version"] = 1;
  auto& arr = root["artifacts"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json row;
    row["id"] = r.id;
    row["path"] = r.path.generic_string();
    row["label"] = r.label ? nlohmann::ordered_json(to_string(*r.label)) : nlohmann::ordered_json();
    arr.push_back(std::move(row));
  }
  return root.dump(2) + "\n";
}

void write_manifest(const std::filesystem::path& dir, const std::vector<ManifestRow>& rows) {
  write_text_file(dir / "manifest.json", manifest_json(rows));
}

std::vector<ManifestRow> write_corpus(const CorpusSpec& spec, const std::filesystem::path& dir) {
  std::vector<ManifestRow> rows;
  for (const auto& entry : generate(spec)) {
    std::filesystem::path file = entry.id + ".json";
    ingest::save_artifact(dir / file, entry.artifact);
    rows.push_back({entry.id, file, entry.artifact.label});
  }
  write_manifest(dir, rows);
  return rows;
}

std::vector<ManifestRow> corpus_manifest(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw IoError(dir.string() + ": not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    if (entry.path().filename() == "manifest.json") continue;
    files.push_back(entry.path().filename());
  }
  std::sort(files.begin(), files.end());
  std::vector<ManifestRow> rows;
  for (const auto& file : files) {
    DiffArtifact a = ingest::load_artifact(dir / file);
    rows.push_back({file.stem().string(), file, a.label});
  }
  return rows;
}

std::vector<ManifestRow> read_manifest(const std::filesystem::path& manifest_path) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(read_text_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(manifest_path.string() + ": " + e.what());
  }
  auto fail = [&](const std::string& what) -> SchemaError {
    return SchemaError(manifest_path.string() + ": " + what);
  };
  if (!root.is_object() || !root.contains("artifacts") || !root["artifacts"].is_array())
    throw fail("expected object with an 'artifacts' array");
  std::vector<ManifestRow> rows;
  std::size_t i = 0;
  for (const auto& row : root["artifacts"]) {
    std::string where = "artifacts[" + std::to_string(i++) + "]";
    if (!row.is_object() || !row.contains("path") || !row["path"].is_string())
      throw fail(where + ".path: missing");
    ManifestRow r;
    r.path = row["path"].get<std::string>();
    r.id = row.value("id", r.path.stem().string());
    if (row.contains("label") && !row["label"].is_null()) {
      if (!row["label"].is_string()) throw fail(where + ".label: expected string");
      r.label = parse_label(row["label"].get<std::string>());
      if (!r.label) throw fail(where + ".label: invalid");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace diffsense::corpus
