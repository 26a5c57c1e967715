#include "ukp/model/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace ukp::model {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

std::vector<int> parse_int_list(const std::string& v) {
    std::vector<int> out;
    std::istringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        out.push_back(std::stoi(tok));
    }
    return out;
}

std::string int_list_str(const std::vector<int>& v) {
    std::ostringstream os;
    for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

struct Entry {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::map<std::string, Entry>& registry() {
    static const std::map<std::string, Entry> reg = [] {
        std::map<std::string, Entry> r;
        auto add_f = [&r](const char* k, float RunConfig::* f) {
            r[k] = {[f](RunConfig& c, const std::string& v) { c.*f = std::stof(v); },
                    [f](const RunConfig& c) {
                        char buf[32];
                        std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(c.*f));
                        return std::string(buf);
                    }};
        };
        auto add_i = [&r](const char* k, int RunConfig::* f) {
            r[k] = {[f](RunConfig& c, const std::string& v) { c.*f = std::stoi(v); },
                    [f](const RunConfig& c) { return std::to_string(c.*f); }};
        };
        auto add_il = [&r](const char* k, std::vector<int> RunConfig::* f) {
            r[k] = {[f](RunConfig& c, const std::string& v) { c.*f = parse_int_list(v); },
                    [f](const RunConfig& c) { return int_list_str(c.*f); }};
        };
        auto add_s = [&r](const char* k, std::string RunConfig::* f) {
            r[k] = {[f](RunConfig& c, const std::string& v) { c.*f = v; },
                    [f](const RunConfig& c) { return c.*f; }};
        };
        add_i("sdv_grid", &RunConfig::sdv_grid);
        add_f("lrf_radius", &RunConfig::lrf_radius);
        add_f("sdv_sigma_vox", &RunConfig::sdv_sigma_vox);
        add_il("encoder_channels", &RunConfig::encoder_channels);
        add_il("encoder_strides", &RunConfig::encoder_strides);
        add_il("trunk_widths", &RunConfig::trunk_widths);
        add_i("embed_dim", &RunConfig::embed_dim);
        add_il("critic_channels", &RunConfig::critic_channels);
        add_s("critic_pool", &RunConfig::critic_pool);
        add_i("decoder_leaves", &RunConfig::decoder_leaves);
        add_f("leaky_slope", &RunConfig::leaky_slope);
        add_f("beta_alpha", &RunConfig::beta_alpha);
        add_f("beta_beta", &RunConfig::beta_beta);
        add_s("gamma_mode", &RunConfig::gamma_mode);
        add_f("gamma", &RunConfig::gamma);
        add_il("xyz_mlp_widths", &RunConfig::xyz_mlp_widths);
        add_f("sal_init_gain", &RunConfig::sal_init_gain);
        add_f("lr", &RunConfig::lr);
        add_f("critic_lr", &RunConfig::critic_lr);
        add_i("batch_size", &RunConfig::batch_size);
        add_i("critic_steps_per_gen", &RunConfig::critic_steps_per_gen);
        add_i("critic_warmup_steps", &RunConfig::critic_warmup_steps);
        add_i("epochs", &RunConfig::epochs);
        r["seed"] = {[](RunConfig& c, const std::string& v) { c.seed = std::stoull(v); },
                     [](const RunConfig& c) { return std::to_string(c.seed); }};
        add_f("beta1_recon", &RunConfig::beta1_recon);
        add_f("beta2_gan", &RunConfig::beta2_gan);
        add_f("beta3_sym", &RunConfig::beta3_sym);
        add_f("lambda_gp", &RunConfig::lambda_gp);
        add_f("adam_beta1", &RunConfig::adam_beta1);
        add_f("adam_beta2", &RunConfig::adam_beta2);
        add_f("adam_eps", &RunConfig::adam_eps);
        add_s("ablations", &RunConfig::ablations);
        add_f("nms_radius", &RunConfig::nms_radius);
        add_f("threshold", &RunConfig::threshold);
        add_i("threads", &RunConfig::threads);
        return r;
    }();
    return reg;
}

}  // namespace

Ablations RunConfig::parse_ablations() const {
    Ablations a;
    std::istringstream ss(ablations);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        if (tok == "no_gan") a.no_gan = true;
        else if (tok == "no_distill") a.no_distill = true;
        else if (tok == "no_lrf") a.no_lrf = true;
        else if (tok == "no_sym") a.no_sym = true;
        else throw ConfigError("unknown ablation: " + tok);
    }
    return a;
}

void RunConfig::set_ablation(const std::string& name) {
    if (!ablations.empty()) ablations += ",";
    ablations += name;
    parse_ablations();  // validates
}

void RunConfig::validate() const {
    if (sdv_grid < 2) throw ConfigError("sdv_grid must be >= 2");
    if (lrf_radius <= 0.0f) throw ConfigError("lrf_radius must be positive");
    if (encoder_channels.empty()) throw ConfigError("encoder_channels empty");
    if (encoder_strides.size() != encoder_channels.size())
        throw ConfigError("encoder_strides must match encoder_channels in length");
    if (trunk_widths.size() != 2) throw ConfigError("trunk_widths must list two widths");
    if (embed_dim < 1) throw ConfigError("embed_dim must be >= 1");
    if (critic_channels.empty() || critic_channels.back() != 1)
        throw ConfigError("critic_channels must end with 1");
    if (gamma_mode != "max" && gamma_mode != "soft") throw ConfigError("gamma_mode must be max or soft");
    if (critic_pool != "mean" && critic_pool != "max") throw ConfigError("critic_pool must be mean or max");
    if (gamma < 1.0f) throw ConfigError("gamma must be >= 1");
    if (beta_alpha <= 0.0f || beta_beta <= 0.0f) throw ConfigError("beta prior parameters must be positive");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (critic_steps_per_gen < 1) throw ConfigError("critic_steps_per_gen must be >= 1");
    if (critic_warmup_steps < 0) throw ConfigError("critic_warmup_steps must be >= 0");
    if (beta1_recon < 0.0f || beta2_gan < 0.0f || beta3_sym < 0.0f || lambda_gp < 0.0f)
        throw ConfigError("loss weights must be >= 0");
    if (nms_radius <= 0.0f) throw ConfigError("nms_radius must be positive");
    if (threads < 1) throw ConfigError("threads must be >= 1");
    // decoder leaf count must be 4 * 8^k
    int64_t leaves = decoder_leaves;
    if (leaves % 4 != 0) throw ConfigError("decoder_leaves must be 4 * 8^k");
    leaves /= 4;
    while (leaves > 1) {
        if (leaves % 8 != 0) throw ConfigError("decoder_leaves must be 4 * 8^k");
        leaves /= 8;
    }
    parse_ablations();
}

void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto it = registry().find(key);
    if (it == registry().end()) throw ConfigError("unknown config key: " + key);
    try {
        it->second.set(cfg, value);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("bad value for " + key + ": '" + value + "'");
    }
}

void merge_config_file(RunConfig& cfg, const std::string& path, std::vector<std::string>* applied_keys) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config file " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        apply_config_line(cfg, key, value);
        if (applied_keys) applied_keys->push_back(key);
    }
}

RunConfig load_config(const std::string& path) {
    RunConfig cfg;
    merge_config_file(cfg, path);
    return cfg;
}

void save_config(const std::string& path, const RunConfig& cfg) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp);
        os << "# resolved run configuration\n";
        for (const auto& [key, entry] : registry()) os << key << " = " << entry.get(cfg) << "\n";
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot rename " + tmp);
}

}  // namespace ukp::model
