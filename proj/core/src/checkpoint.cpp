// Checkpoint layout (see docs/checkpoint_format.md):
//
//   GCABULF-CHECKPOINT
//   version=<int>
//   <key>=<value>            (one per line, UTF-8, no '\n' in values)
//   arrays=<count>
//   end-header
//   then <count> times:
//     array <name> <rows> <cols>\n
//     rows*cols little-endian IEEE-754 binary64 values
//   end\n
#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "gcabulf/errors.hpp"
#include "gcabulf/pipeline.hpp"

namespace gcabulf {

namespace {

constexpr const char* kMagic = "GCABULF-CHECKPOINT";

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '\\') {
      out += "\\\\";
    } else if (ch == '\n') {
      out += "\\n";
    } else {
      out += ch;
    }
  }
  return out;
}

std::string unescape(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      out += s[i + 1] == 'n' ? '\n' : s[i + 1];
      ++i;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::string join_ids(const std::vector<int>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ids[i]);
  }
  return out;
}

std::vector<int> parse_ids(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw DataError("checkpoint: malformed id list '" + text + "'");
    }
  }
  return out;
}

struct NamedTensor {
  std::string name;
  const Tensor2* tensor;
};

void append_net(std::vector<NamedTensor>& out, const std::string& prefix, const LstmFcNet& net) {
  auto& mut = const_cast<LstmFcNet&>(net);
  for (const auto& p : mut.parameters(prefix)) out.push_back({p.name, p.value});
}

Tensor2 row_tensor(const std::vector<double>& v) {
  Tensor2 t(1, v.size());
  for (std::size_t i = 0; i < v.size(); ++i) t[i] = v[i];
  return t;
}

// Scaling blocks are materialized as temporaries so they can share the array writer.
std::vector<std::pair<std::string, Tensor2>> scaling_arrays(const ForecastModel& model) {
  std::vector<std::pair<std::string, Tensor2>> out;
  auto add = [&](const std::string& prefix, const SubnetScaling& s) {
    out.emplace_back(prefix + ".input_mean", row_tensor(s.input.mean));
    out.emplace_back(prefix + ".input_scale", row_tensor(s.input.scale));
    out.emplace_back(prefix + ".target", row_tensor({s.target_mean, s.target_scale}));
  };
  add("scaling.agg", model.agg_scaling);
  for (std::size_t i = 0; i < model.group_scaling.size(); ++i) add("scaling.group" + std::to_string(i), model.group_scaling[i]);
  return out;
}

void write_u64_le(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes, 8);
}

std::uint64_t read_u64_le(const char* bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i])) << (8 * i);
  return v;
}

}  // namespace

void save_checkpoint(const ForecastModel& model, const std::string& path) {
  std::vector<std::pair<std::string, std::string>> header;
  for (const auto& [k, v] : to_key_values(model.config)) header.emplace_back("config." + k, v);
  header.emplace_back("critical.count", std::to_string(model.critical.size()));
  for (std::size_t i = 0; i < model.critical.size(); ++i) {
    header.emplace_back("critical." + std::to_string(i) + ".id", std::to_string(model.critical[i].id));
    header.emplace_back("critical." + std::to_string(i) + ".name", escape(model.critical[i].name));
  }
  header.emplace_back("grouping.epsilon", format_real(model.grouping.epsilon));
  header.emplace_back("grouping.count", std::to_string(model.grouping.group_count()));
  for (std::size_t i = 0; i < model.grouping.group_count(); ++i) {
    header.emplace_back("grouping." + std::to_string(i), join_ids(model.grouping.groups[i]));
  }
  header.emplace_back("history.count", std::to_string(model.history.epochs.size()));
  for (std::size_t i = 0; i < model.history.epochs.size(); ++i) {
    const auto& e = model.history.epochs[i];
    header.emplace_back("history." + std::to_string(i),
                        e.component + "," + std::to_string(e.epoch) + "," + format_real(e.train_loss) + "," +
                            format_real(e.val_loss));
  }

  std::vector<NamedTensor> arrays;
  append_net(arrays, "agg.", model.agg_net);
  for (std::size_t i = 0; i < model.group_nets.size(); ++i) append_net(arrays, "group" + std::to_string(i) + ".", model.group_nets[i]);
  for (std::size_t l = 0; l < model.co_predictor.weights.size(); ++l) {
    arrays.push_back({"co.W" + std::to_string(l + 1), &model.co_predictor.weights[l]});
    arrays.push_back({"co.b" + std::to_string(l + 1), &model.co_predictor.biases[l]});
  }
  const auto scaling = scaling_arrays(model);
  for (const auto& [name, t] : scaling) arrays.push_back({name, &t});

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint " + path);
  out << kMagic << '\n' << "version=" << kCheckpointVersion << '\n';
  for (const auto& [k, v] : header) out << k << '=' << v << '\n';
  out << "arrays=" << arrays.size() << '\n' << "end-header\n";
  for (const auto& a : arrays) {
    out << "array " << a.name << ' ' << a.tensor->rows() << ' ' << a.tensor->cols() << '\n';
    for (double v : a.tensor->data()) write_u64_le(out, std::bit_cast<std::uint64_t>(v));
  }
  out << "end\n";
  if (!out) throw DataError("failed writing checkpoint " + path);
}

ForecastModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path);
  auto fail = [&](const std::string& why) -> ForecastModel { throw DataError("checkpoint " + path + ": " + why); };

  std::string line;
  if (!std::getline(in, line) || line != kMagic) return fail("not a checkpoint file");
  std::map<std::string, std::string> header;
  std::vector<std::string> order;
  bool ended = false;
  while (std::getline(in, line)) {
    if (line == "end-header") {
      ended = true;
      break;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) return fail("malformed header line '" + line + "'");
    header[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (!ended) return fail("truncated header");
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = header.find(key);
    if (it == header.end()) throw DataError("checkpoint " + path + ": missing header key '" + key + "'");
    return it->second;
  };
  auto get_count = [&](const std::string& key) {
    try {
      return static_cast<std::size_t>(std::stoull(get(key)));
    } catch (const std::logic_error&) {
      throw DataError("checkpoint " + path + ": malformed count for '" + key + "'");
    }
  };
  if (get("version") != std::to_string(kCheckpointVersion)) {
    return fail("unsupported format version " + get("version") + " (expected " + std::to_string(kCheckpointVersion) + ")");
  }

  ForecastModel model;
  for (const auto& [k, v] : header) {
    if (k.rfind("config.", 0) == 0) set_config_value(model.config, k.substr(7), v);
  }
  validate(model.config);
  const auto critical_count = get_count("critical.count");
  for (std::size_t i = 0; i < critical_count; ++i) {
    const auto ids = parse_ids(get("critical." + std::to_string(i) + ".id"));
    if (ids.size() != 1) return fail("malformed critical id");
    model.critical.push_back({ids[0], unescape(get("critical." + std::to_string(i) + ".name"))});
  }
  try {
    model.grouping.epsilon = std::stod(get("grouping.epsilon"));
  } catch (const std::logic_error&) {
    return fail("malformed grouping epsilon");
  }
  const auto group_count = get_count("grouping.count");
  for (std::size_t i = 0; i < group_count; ++i) model.grouping.groups.push_back(parse_ids(get("grouping." + std::to_string(i))));
  const auto history_count = get_count("history.count");
  for (std::size_t i = 0; i < history_count; ++i) {
    std::stringstream ss(get("history." + std::to_string(i)));
    EpochRecord e;
    std::string epoch, train, val;
    if (!std::getline(ss, e.component, ',') || !std::getline(ss, epoch, ',') || !std::getline(ss, train, ',') ||
        !std::getline(ss, val)) {
      return fail("malformed history record");
    }
    try {
      e.epoch = std::stoull(epoch);
      e.train_loss = std::stod(train);
      e.val_loss = std::stod(val);
    } catch (const std::logic_error&) {
      return fail("malformed history record");
    }
    model.history.epochs.push_back(e);
  }

  // Rebuild the structure, then fill every tensor by name.
  const auto& c = model.config;
  LstmFcShape shape;
  shape.hidden_dim = c.hidden_dim;
  shape.context_dim = kContextDim;
  shape.fc_hidden = c.fc_hidden;
  shape.gates = c.gates;
  shape.readout = c.readout;
  shape.input_dim = model.agg_channels();
  model.agg_net = LstmFcNet(shape);
  for (const auto& g : model.grouping.groups) {
    if (g.empty()) return fail("empty group");
    shape.input_dim = g.size();
    model.group_nets.emplace_back(shape);
  }
  std::vector<std::size_t> co{group_count + 1};
  co.insert(co.end(), c.co_hidden.begin(), c.co_hidden.end());
  co.push_back(1);
  model.co_predictor = FcStack(co);

  std::map<std::string, Tensor2> arrays;
  const auto array_count = get_count("arrays");
  std::vector<char> buf;
  for (std::size_t a = 0; a < array_count; ++a) {
    if (!std::getline(in, line)) return fail("truncated before array " + std::to_string(a));
    std::stringstream ss(line);
    std::string tag, name;
    std::size_t rows = 0, cols = 0;
    if (!(ss >> tag >> name >> rows >> cols) || tag != "array") return fail("malformed array record");
    buf.resize(rows * cols * 8);
    if (!in.read(buf.data(), static_cast<std::streamsize>(buf.size()))) return fail("truncated array '" + name + "'");
    Tensor2 t(rows, cols);
    for (std::size_t i = 0; i < rows * cols; ++i) t[i] = std::bit_cast<double>(read_u64_le(buf.data() + 8 * i));
    arrays[name] = std::move(t);
  }
  if (!std::getline(in, line) || line != "end") return fail("missing end marker (truncated file?)");

  auto take = [&](const std::string& name, Tensor2& dst) {
    const auto it = arrays.find(name);
    if (it == arrays.end()) throw DataError("checkpoint " + path + ": missing array '" + name + "'");
    if (!it->second.same_shape(dst)) throw DataError("checkpoint " + path + ": shape mismatch for '" + name + "'");
    dst = it->second;
  };
  auto load_net = [&](const std::string& prefix, LstmFcNet& net) {
    for (auto& p : net.parameters(prefix)) take(p.name, *p.value);
  };
  load_net("agg.", model.agg_net);
  for (std::size_t i = 0; i < model.group_nets.size(); ++i) load_net("group" + std::to_string(i) + ".", model.group_nets[i]);
  for (std::size_t l = 0; l < model.co_predictor.weights.size(); ++l) {
    take("co.W" + std::to_string(l + 1), model.co_predictor.weights[l]);
    take("co.b" + std::to_string(l + 1), model.co_predictor.biases[l]);
  }
  auto load_scaling = [&](const std::string& prefix, std::size_t channels) {
    SubnetScaling s;
    Tensor2 mean(1, channels), scale(1, channels), target(1, 2);
    take(prefix + ".input_mean", mean);
    take(prefix + ".input_scale", scale);
    take(prefix + ".target", target);
    s.input.mean.assign(mean.data().begin(), mean.data().end());
    s.input.scale.assign(scale.data().begin(), scale.data().end());
    s.target_mean = target[0];
    s.target_scale = target[1];
    return s;
  };
  model.agg_scaling = load_scaling("scaling.agg", model.agg_channels());
  for (std::size_t i = 0; i < group_count; ++i) {
    model.group_scaling.push_back(load_scaling("scaling.group" + std::to_string(i), model.grouping.groups[i].size()));
  }
  return model;
}

}  // namespace gcabulf
