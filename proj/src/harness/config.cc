// Copyright 2026 The LH-IQN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lhiqn/harness/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "lhiqn/errors.h"

namespace lhiqn::harness {

namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& text) {
  const std::string s = Trim(text);
  T value{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
    throw ConfigError("config: key '" + key + "' has invalid value '" + text + "'");
  }
  return value;
}

bool ParseBool(const std::string& key, const std::string& text) {
  const std::string s = Trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config: key '" + key + "' expects true or false, got '" + text + "'");
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
std::string JoinList(const std::vector<T>& values) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << values[i];
  return out.str();
}

struct Field {
  std::string key;
  std::function<void(const std::string&)> set;
  std::function<std::string()> get;
};

Field IntField(const std::string& key, int* p) {
  return {key, [=](const std::string& v) { *p = ParseNumber<int>(key, v); },
          [=] { return std::to_string(*p); }};
}
Field LongField(const std::string& key, long* p) {
  return {key, [=](const std::string& v) { *p = ParseNumber<long>(key, v); },
          [=] { return std::to_string(*p); }};
}
Field DoubleField(const std::string& key, double* p) {
  return {key, [=](const std::string& v) { *p = ParseNumber<double>(key, v); },
          [=] { return FormatDouble(*p); }};
}
Field BoolField(const std::string& key, bool* p) {
  return {key, [=](const std::string& v) { *p = ParseBool(key, v); },
          [=] { return std::string(*p ? "true" : "false"); }};
}
Field StringField(const std::string& key, std::string* p) {
  return {key, [=](const std::string& v) { *p = Trim(v); }, [=] { return *p; }};
}
Field IntListField(const std::string& key, std::vector<int>* p) {
  return {key,
          [=](const std::string& v) {
            p->clear();
            for (const std::string& item : SplitList(v)) p->push_back(ParseNumber<int>(key, item));
          },
          [=] { return JoinList(*p); }};
}

// "x0,y0,x1,y1,high,p_high,low": a rectangle of drop cells and its reward.
env::DropZone ParseDropZone(const std::string& key, const std::string& text) {
  const auto items = SplitList(text);
  if (items.size() != 7) {
    throw ConfigError("config: key '" + key + "' expects x0,y0,x1,y1,high,p_high,low");
  }
  const int x0 = ParseNumber<int>(key, items[0]), y0 = ParseNumber<int>(key, items[1]);
  const int x1 = ParseNumber<int>(key, items[2]), y1 = ParseNumber<int>(key, items[3]);
  if (x1 < x0 || y1 < y0) throw ConfigError("config: key '" + key + "' has an empty rectangle");
  env::DropZone zone;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) zone.cells.push_back({x, y});
  }
  zone.high = ParseNumber<double>(key, items[4]);
  zone.p_high = ParseNumber<double>(key, items[5]);
  zone.low = ParseNumber<double>(key, items[6]);
  return zone;
}

std::string DumpDropZone(const env::DropZone& zone) {
  int x0 = zone.cells.front().x, x1 = x0, y0 = zone.cells.front().y, y1 = y0;
  for (const env::Cell& c : zone.cells) {
    x0 = std::min(x0, c.x);
    x1 = std::max(x1, c.x);
    y0 = std::min(y0, c.y);
    y1 = std::max(y1, c.y);
  }
  std::ostringstream out;
  out << x0 << "," << y0 << "," << x1 << "," << y1 << "," << FormatDouble(zone.high) << ","
      << FormatDouble(zone.p_high) << "," << FormatDouble(zone.low);
  return out.str();
}

std::vector<Field> EnvFields(env::EnvConfig* e) {
  return {
      {"kind", [=](const std::string& v) { e->kind = env::ParseEnvKind(Trim(v)); },
       [=] { return env::EnvKindName(e->kind); }},
      IntField("grid_size", &e->grid_size),
      DoubleField("transition_noise", &e->transition_noise),
      DoubleField("flicker", &e->flicker),
      DoubleField("image_noise", &e->image_noise),
      IntField("image_size", &e->image_size),
      IntField("episode_cap", &e->episode_cap),
      BoolField("static_target", &e->static_target),
      {"cmotp_variant",
       [=](const std::string& v) { e->cmotp_variant = env::ParseCmotpVariant(Trim(v)); },
       [=] { return env::CmotpVariantName(e->cmotp_variant); }},
      BoolField("cmotp_flicker", &e->cmotp_flicker),
  };
}

std::vector<Field> AgentFields(agent::HyperParams* h) {
  return {
      {"algorithm",
       [=](const std::string& v) { h->variant.algorithm = agent::ParseAlgorithm(Trim(v)); },
       [=] { return agent::AlgorithmName(h->variant.algorithm); }},
      BoolField("recurrent", &h->variant.recurrent),
      DoubleField("beta", &h->beta),
      DoubleField("gamma", &h->gamma),
      DoubleField("learning_rate", &h->learning_rate),
      DoubleField("kappa", &h->kappa),
      IntField("n", &h->n),
      IntField("n_prime", &h->n_prime),
      IntField("m", &h->m),
      IntField("m_prime", &h->m_prime),
      IntField("k", &h->k),
      BoolField("renormalize_tdl", &h->renormalize_tdl),
      LongField("target_period", &h->target_period),
      IntField("batch_size", &h->batch_size),
      IntField("trace_length", &h->trace_length),
      DoubleField("epsilon_start", &h->epsilon.start),
      DoubleField("epsilon_end", &h->epsilon.end),
      LongField("epsilon_steps", &h->epsilon.steps),
      {"eta_mode",
       [=](const std::string& v) {
         const std::string s = Trim(v);
         if (s == "tied") h->eta_mode = agent::EtaMode::kTiedToEpsilon;
         else if (s == "linear") h->eta_mode = agent::EtaMode::kLinear;
         else throw ConfigError("config: eta_mode must be tied or linear, got '" + s + "'");
       },
       [=] {
         return std::string(h->eta_mode == agent::EtaMode::kTiedToEpsilon ? "tied" : "linear");
       }},
      DoubleField("eta_start", &h->eta.start),
      DoubleField("eta_end", &h->eta.end),
      LongField("eta_steps", &h->eta.steps),
      {"distortion",
       [=](const std::string& v) {
         try {
           h->distortion = dist::ParseDistortionKind(Trim(v));
         } catch (const std::invalid_argument& e) {
           throw ConfigError(std::string("config: ") + e.what());
         }
       },
       [=] { return dist::DistortionKindName(h->distortion); }},
      BoolField("literal_cvnar", &h->literal_cvnar),
      IntListField("trunk", &h->trunk),
      IntField("lstm_cells", &h->lstm_cells),
      IntField("embedding_n", &h->embedding_n),
      IntListField("head", &h->head),
      IntListField("conv_kernels", &h->conv_kernels),
      IntListField("conv_kernel_sizes", &h->conv_kernel_sizes),
      IntListField("conv_strides", &h->conv_strides),
      IntField("conv_dense", &h->conv_dense),
      {"precision",
       [=](const std::string& v) {
         const std::string s = Trim(v);
         if (s == "float") h->double_precision = false;
         else if (s == "double") h->double_precision = true;
         else throw ConfigError("config: precision must be float or double, got '" + s + "'");
       },
       [=] { return std::string(h->double_precision ? "double" : "float"); }},
  };
}

std::vector<Field> RunFields(RunConfig* r) {
  return {
      StringField("name", &r->name),
      LongField("total_steps", &r->total_steps),
      LongField("eval_period", &r->eval_period),
      IntField("eval_episodes", &r->eval_episodes),
      IntField("final_eval_episodes", &r->final_eval_episodes),
      {"seeds",
       [=](const std::string& v) {
         r->seeds.clear();
         for (const std::string& item : SplitList(v)) {
           r->seeds.push_back(ParseNumber<std::uint64_t>("seeds", item));
         }
       },
       [=] { return JoinList(r->seeds); }},
      StringField("output_dir", &r->output_dir),
      LongField("warmup_steps", &r->warmup_steps),
      IntField("train_period", &r->train_period),
      IntField("replay_capacity", &r->replay_capacity),
      IntField("workers", &r->workers),
      BoolField("threaded_learners", &r->threaded_learners),
      BoolField("wall_clock", &r->wall_clock),
      BoolField("checkpoint", &r->checkpoint),
  };
}

void ApplySection(const boost::property_tree::ptree& section, const std::string& name,
                  const std::vector<Field>& fields, env::EnvConfig* env_config) {
  for (const auto& [key, node] : section) {
    if (env_config != nullptr && key.rfind("drop_zone_", 0) == 0) {
      env_config->drop_zones.push_back(ParseDropZone(key, node.data()));
      continue;
    }
    bool found = false;
    for (const Field& f : fields) {
      if (f.key == key) {
        f.set(node.data());
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError("config: unknown key '" + key + "' in [" + name + "]");
  }
}

}  // namespace

void ExperimentConfig::Validate() const {
  env.Validate();
  agent.Validate();
  if (run.total_steps < 1) throw ConfigError("run: total_steps must be >= 1");
  if (run.eval_period < 1 || run.total_steps < run.eval_period) {
    throw ConfigError("run: eval_period must lie in [1, total_steps]");
  }
  if (run.eval_episodes < 1 || run.final_eval_episodes < 1) {
    throw ConfigError("run: eval episode counts must be >= 1");
  }
  if (run.seeds.empty()) throw ConfigError("run: need at least one seed");
  if (run.warmup_steps < 0) throw ConfigError("run: warmup_steps must be >= 0");
  if (run.train_period < 1) throw ConfigError("run: train_period must be >= 1");
  if (run.replay_capacity < 1) throw ConfigError("run: replay_capacity must be >= 1");
  if (run.workers < 1) throw ConfigError("run: workers must be >= 1");
}

ExperimentConfig ParseConfig(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ExperimentConfig config;
  for (const auto& [name, section] : tree) {
    if (name == "env") {
      ApplySection(section, name, EnvFields(&config.env), &config.env);
    } else if (name == "agent") {
      ApplySection(section, name, AgentFields(&config.agent), nullptr);
    } else if (name == "run") {
      ApplySection(section, name, RunFields(&config.run), nullptr);
    } else {
      throw ConfigError("config: unknown section [" + name + "]");
    }
  }
  config.Validate();
  return config;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str());
}

std::string DumpConfig(const ExperimentConfig& config) {
  ExperimentConfig copy = config;
  std::ostringstream out;
  out << "[env]\n";
  for (const Field& f : EnvFields(&copy.env)) out << f.key << " = " << f.get() << "\n";
  for (std::size_t i = 0; i < copy.env.drop_zones.size(); ++i) {
    out << "drop_zone_" << i << " = " << DumpDropZone(copy.env.drop_zones[i]) << "\n";
  }
  out << "\n[agent]\n";
  for (const Field& f : AgentFields(&copy.agent)) out << f.key << " = " << f.get() << "\n";
  out << "\n[run]\n";
  for (const Field& f : RunFields(&copy.run)) out << f.key << " = " << f.get() << "\n";
  return out.str();
}

}  // namespace lhiqn::harness
