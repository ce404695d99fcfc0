#include "netfuse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "netfuse/rng.hpp"

namespace netfuse {

namespace {

const std::vector<std::pair<std::string, std::size_t>> kCensus = {
    {"normal", 67343}, {"neptune", 41214}, {"satan", 3633},   {"ipsweep", 3599},
    {"portsweep", 2931}, {"smurf", 2646},  {"nmap", 1493},    {"back", 956},
    {"teardrop", 892},   {"warezclient", 890}, {"pod", 201},  {"guess_passwd", 53},
    {"buffer_overflow", 30}, {"warezmaster", 20}, {"land", 18}, {"imap", 11},
    {"rootkit", 10},     {"loadmodule", 9}, {"ftp_write", 8}, {"multihop", 7},
    {"phf", 4},          {"perl", 3},       {"spy", 2},
};

struct Weighted {
    const char* value;
    double weight;
};

std::string pick(Rng& rng, const std::vector<Weighted>& table) {
    double total = 0.0;
    for (const auto& w : table) total += w.weight;
    double x = rng.uniform() * total;
    for (const auto& w : table) {
        x -= w.weight;
        if (x <= 0.0) return w.value;
    }
    return table.back().value;
}

double rate2(double x) { return std::round(std::clamp(x, 0.0, 1.0) * 100.0) / 100.0; }

double count_like(Rng& rng, double mean, double cap) {
    return std::min(std::floor(rng.exponential(mean)), cap);
}

// feature indices used by the generator
namespace fi {
constexpr int duration = 0;
constexpr int src_bytes = 4;
constexpr int dst_bytes = 5;
constexpr int wrong_fragment = 7;
constexpr int hot = 9;
constexpr int num_failed_logins = 10;
constexpr int logged_in = 11;
constexpr int root_shell = 13;
constexpr int count = 22;
constexpr int srv_count = 23;
constexpr int serror_rate = 24;
constexpr int srv_serror_rate = 25;
constexpr int rerror_rate = 26;
constexpr int srv_rerror_rate = 27;
constexpr int same_srv_rate = 28;
constexpr int diff_srv_rate = 29;
constexpr int srv_diff_host_rate = 30;
constexpr int dst_host_count = 31;
constexpr int dst_host_srv_count = 32;
constexpr int dst_host_same_srv_rate = 33;
constexpr int dst_host_diff_srv_rate = 34;
constexpr int dst_host_serror_rate = 37;
constexpr int dst_host_rerror_rate = 39;
}  // namespace fi

void set(ConnectionRecord& rec, int feature, double value) {
    rec.numeric[static_cast<std::size_t>(feature)] = value;
}

const std::vector<Weighted> kNormalService = {
    {"http", 0.45},   {"smtp", 0.11},  {"ftp_data", 0.09}, {"domain_u", 0.09},
    {"other", 0.04},  {"private", 0.03}, {"ftp", 0.04},    {"telnet", 0.03},
    {"pop_3", 0.025}, {"finger", 0.02}, {"auth", 0.02},    {"ntp_u", 0.02},
    {"eco_i", 0.01},  {"imap4", 0.01}, {"urp_i", 0.01},    {"uucp", 0.01},
};

const std::vector<Weighted> kScanService = {
    {"private", 0.3}, {"other", 0.12}, {"eco_i", 0.12}, {"ecr_i", 0.1},
    {"telnet", 0.08}, {"finger", 0.08}, {"ftp", 0.06},  {"uucp", 0.06},
    {"csnet_ns", 0.04}, {"Z39_50", 0.04},
};

void fill_normal(ConnectionRecord& rec, Rng& rng) {
    rec.symbols[0] = pick(rng, {{"tcp", 0.82}, {"udp", 0.14}, {"icmp", 0.04}});
    rec.symbols[1] = pick(rng, kNormalService);
    rec.symbols[2] = pick(rng, {{"SF", 0.93}, {"REJ", 0.035}, {"RSTR", 0.02},
                                {"RSTO", 0.01}, {"S1", 0.005}});
    set(rec, fi::duration, rng.bernoulli(0.6) ? 0.0 : count_like(rng, 25.0, 5000.0));
    set(rec, fi::src_bytes, rng.bernoulli(0.05) ? 0.0 : std::floor(45.0 + rng.exponential(300.0)));
    set(rec, fi::dst_bytes, rng.bernoulli(0.2) ? 0.0 : std::floor(rng.exponential(1200.0)));
    set(rec, fi::logged_in, rng.bernoulli(0.75) ? 1.0 : 0.0);
    set(rec, fi::hot, rng.bernoulli(0.95) ? 0.0 : 1.0 + static_cast<double>(rng.below(2)));
    const double cnt = 1.0 + count_like(rng, 4.0, 40.0);
    set(rec, fi::count, cnt);
    set(rec, fi::srv_count, std::max(1.0, std::floor(cnt * rng.uniform(0.5, 1.0))));
    set(rec, fi::serror_rate, rng.bernoulli(0.97) ? 0.0 : rate2(rng.uniform(0.0, 0.15)));
    set(rec, fi::srv_serror_rate, rec.numeric[fi::serror_rate]);
    set(rec, fi::rerror_rate, rng.bernoulli(0.95) ? 0.0 : rate2(rng.uniform(0.0, 0.2)));
    set(rec, fi::srv_rerror_rate, rec.numeric[fi::rerror_rate]);
    set(rec, fi::same_srv_rate, rate2(rng.uniform(0.75, 1.0)));
    set(rec, fi::diff_srv_rate, rate2(rng.uniform(0.0, 0.1)));
    set(rec, fi::srv_diff_host_rate, rate2(rng.uniform(0.0, 0.2)));
    set(rec, fi::dst_host_count, 1.0 + static_cast<double>(rng.below(255)));
    set(rec, fi::dst_host_srv_count, 1.0 + static_cast<double>(rng.below(255)));
    set(rec, fi::dst_host_same_srv_rate, rate2(rng.uniform(0.6, 1.0)));
    set(rec, fi::dst_host_diff_srv_rate, rate2(rng.uniform(0.0, 0.15)));
    set(rec, fi::dst_host_serror_rate, rng.bernoulli(0.96) ? 0.0 : rate2(rng.uniform(0.0, 0.1)));
    set(rec, fi::dst_host_rerror_rate, rng.bernoulli(0.94) ? 0.0 : rate2(rng.uniform(0.0, 0.15)));
}

// Overlays for the two ambiguous border regions. Both classes keep their
// normal-typical symbols; the attack side is only slightly hotter, so trained
// detectors are forced into boundary errors instead of separating the regions
// cleanly. Two independent axes (SYN-retry bursts and slow bulk drips) keep
// the two detectors' error sets from collapsing onto one another.
void apply_burst(ConnectionRecord& rec, Rng& rng, bool attack_side) {
    const double cnt = attack_side ? std::floor(rng.uniform(60.0, 180.0))
                                   : std::floor(rng.uniform(30.0, 150.0));
    set(rec, fi::count, cnt);
    set(rec, fi::srv_count, std::max(1.0, std::floor(cnt * rng.uniform(0.7, 1.0))));
    const double se = attack_side ? rng.uniform(0.35, 0.8) : rng.uniform(0.3, 0.75);
    set(rec, fi::serror_rate, rate2(se));
    set(rec, fi::srv_serror_rate, rate2(se * rng.uniform(0.9, 1.0)));
    set(rec, fi::dst_host_serror_rate, rate2(se * rng.uniform(0.6, 0.9)));
    if (rng.bernoulli(0.5)) set(rec, fi::src_bytes, 0.0);
    set(rec, fi::same_srv_rate, rate2(rng.uniform(0.4, 0.9)));
}

void apply_drip(ConnectionRecord& rec, Rng& rng, bool attack_side) {
    set(rec, fi::duration, attack_side ? std::floor(rng.uniform(600.0, 3000.0))
                                       : std::floor(rng.uniform(400.0, 2500.0)));
    set(rec, fi::src_bytes, attack_side ? std::floor(rng.uniform(2500.0, 12000.0))
                                        : std::floor(rng.uniform(1800.0, 10000.0)));
    set(rec, fi::dst_bytes, std::floor(rng.uniform(0.0, 200.0)));
    set(rec, fi::logged_in, 1.0);
    set(rec, fi::count, 1.0 + static_cast<double>(rng.below(4)));
    set(rec, fi::srv_count, 1.0 + static_cast<double>(rng.below(4)));
    set(rec, fi::srv_diff_host_rate, rate2(rng.uniform(0.2, attack_side ? 0.8 : 0.7)));
}

void fill_syn_flood(ConnectionRecord& rec, Rng& rng) {
    rec.symbols[0] = "tcp";
    rec.symbols[1] = pick(rng, {{"private", 0.6}, {"other", 0.2}, {"telnet", 0.12},
                                {"finger", 0.08}});
    rec.symbols[2] = pick(rng, {{"S0", 0.88}, {"REJ", 0.08}, {"RSTR", 0.04}});
    set(rec, fi::src_bytes, 0.0);
    set(rec, fi::dst_bytes, 0.0);
    const double cnt = std::floor(rng.uniform(100.0, 511.0));
    set(rec, fi::count, cnt);
    set(rec, fi::srv_count, std::max(1.0, std::floor(cnt * rng.uniform(0.8, 1.0))));
    const double se = rng.uniform(0.85, 1.0);
    set(rec, fi::serror_rate, rate2(se));
    set(rec, fi::srv_serror_rate, rate2(se));
    set(rec, fi::dst_host_serror_rate, rate2(rng.uniform(0.8, 1.0)));
    set(rec, fi::same_srv_rate, rate2(rng.uniform(0.0, 0.15)));
    set(rec, fi::diff_srv_rate, rate2(rng.uniform(0.03, 0.1)));
    set(rec, fi::dst_host_count, 255.0);
    set(rec, fi::dst_host_srv_count, 1.0 + static_cast<double>(rng.below(30)));
    set(rec, fi::dst_host_same_srv_rate, rate2(rng.uniform(0.0, 0.1)));
    set(rec, fi::dst_host_diff_srv_rate, rate2(rng.uniform(0.04, 0.12)));
}

void fill_smurf(ConnectionRecord& rec, Rng& rng) {
    rec.symbols[0] = "icmp";
    rec.symbols[1] = "ecr_i";
    rec.symbols[2] = "SF";
    set(rec, fi::src_bytes, std::floor(rng.uniform(1000.0, 1070.0)));
    set(rec, fi::dst_bytes, 0.0);
    const double cnt = std::floor(rng.uniform(250.0, 511.0));
    set(rec, fi::count, cnt);
    set(rec, fi::srv_count, cnt);
    set(rec, fi::same_srv_rate, 1.0);
    set(rec, fi::dst_host_count, 255.0);
    set(rec, fi::dst_host_srv_count, 255.0);
    set(rec, fi::dst_host_same_srv_rate, 1.0);
}

void fill_fragment_dos(ConnectionRecord& rec, Rng& rng, const std::string& raw) {
    rec.symbols[0] = raw == "teardrop" ? "udp" : "icmp";
    rec.symbols[1] = raw == "teardrop" ? "private" : "ecr_i";
    rec.symbols[2] = "SF";
    set(rec, fi::wrong_fragment, 1.0 + static_cast<double>(rng.below(3)));
    set(rec, fi::src_bytes, std::floor(rng.uniform(20.0, 1500.0)));
    const double cnt = std::floor(rng.uniform(2.0, 160.0));
    set(rec, fi::count, cnt);
    set(rec, fi::srv_count, cnt);
    set(rec, fi::same_srv_rate, 1.0);
    set(rec, fi::dst_host_count, std::floor(rng.uniform(1.0, 255.0)));
}

void fill_back(ConnectionRecord& rec, Rng& rng) {
    rec.symbols[0] = "tcp";
    rec.symbols[1] = "http";
    rec.symbols[2] = "SF";
    set(rec, fi::src_bytes, std::floor(rng.uniform(50000.0, 56000.0)));
    set(rec, fi::dst_bytes, std::floor(rng.uniform(7000.0, 9000.0)));
    set(rec, fi::logged_in, 1.0);
    const double cnt = std::floor(rng.uniform(2.0, 25.0));
    set(rec, fi::count, cnt);
    set(rec, fi::srv_count, cnt);
    set(rec, fi::same_srv_rate, 1.0);
}

void fill_port_scan(ConnectionRecord& rec, Rng& rng) {
    rec.symbols[0] = pick(rng, {{"tcp", 0.85}, {"icmp", 0.1}, {"udp", 0.05}});
    rec.symbols[1] = pick(rng, kScanService);
    rec.symbols[2] = pick(rng, {{"REJ", 0.45}, {"RSTR", 0.35}, {"S0", 0.2}});
    set(rec, fi::src_bytes, std::floor(rng.uniform(0.0, 20.0)));
    set(rec, fi::dst_bytes, rng.bernoulli(0.7) ? 0.0 : std::floor(rng.uniform(0.0, 60.0)));
    set(rec, fi::count, 1.0 + count_like(rng, 8.0, 60.0));
    set(rec, fi::srv_count, 1.0 + count_like(rng, 4.0, 30.0));
    const double re = rng.uniform(0.4, 1.0);
    set(rec, fi::rerror_rate, rate2(re));
    set(rec, fi::srv_rerror_rate, rate2(re));
    set(rec, fi::dst_host_rerror_rate, rate2(rng.uniform(0.3, 1.0)));
    set(rec, fi::same_srv_rate, rate2(rng.uniform(0.0, 0.3)));
    set(rec, fi::diff_srv_rate, rate2(rng.uniform(0.5, 1.0)));
    set(rec, fi::dst_host_count, 255.0);
    set(rec, fi::dst_host_diff_srv_rate, rate2(rng.uniform(0.4, 1.0)));
    set(rec, fi::dst_host_same_srv_rate, rate2(rng.uniform(0.0, 0.2)));
}

void fill_host_sweep(ConnectionRecord& rec, Rng& rng) {
    rec.symbols[0] = pick(rng, {{"icmp", 0.7}, {"tcp", 0.3}});
    rec.symbols[1] = pick(rng, {{"eco_i", 0.6}, {"ecr_i", 0.2}, {"private", 0.2}});
    rec.symbols[2] = pick(rng, {{"SF", 0.3}, {"REJ", 0.4}, {"RSTR", 0.3}});
    set(rec, fi::src_bytes, std::floor(rng.uniform(8.0, 20.0)));
    set(rec, fi::count, 1.0 + static_cast<double>(rng.below(5)));
    set(rec, fi::srv_count, 1.0 + static_cast<double>(rng.below(5)));
    set(rec, fi::srv_diff_host_rate, rate2(rng.uniform(0.5, 1.0)));
    set(rec, fi::dst_host_count, std::floor(rng.uniform(150.0, 255.0)));
    set(rec, fi::dst_host_srv_count, std::floor(rng.uniform(1.0, 30.0)));
    set(rec, fi::dst_host_same_srv_rate, rate2(rng.uniform(0.0, 0.3)));
    set(rec, fi::same_srv_rate, 1.0);
}

void fill_password_guess(ConnectionRecord& rec, Rng& rng) {
    rec.symbols[0] = "tcp";
    rec.symbols[1] = pick(rng, {{"telnet", 0.5}, {"ftp", 0.25}, {"pop_3", 0.25}});
    rec.symbols[2] = pick(rng, {{"SF", 0.6}, {"RSTO", 0.4}});
    set(rec, fi::duration, std::floor(rng.uniform(1.0, 60.0)));
    set(rec, fi::src_bytes, std::floor(rng.uniform(100.0, 350.0)));
    set(rec, fi::dst_bytes, std::floor(rng.uniform(150.0, 500.0)));
    set(rec, fi::num_failed_logins, 1.0 + static_cast<double>(rng.below(5)));
    set(rec, fi::hot, static_cast<double>(rng.below(3)));
    set(rec, fi::count, 1.0 + static_cast<double>(rng.below(4)));
    set(rec, fi::srv_count, 1.0 + static_cast<double>(rng.below(4)));
    set(rec, fi::same_srv_rate, 1.0);
}

void fill_warez(ConnectionRecord& rec, Rng& rng) {
    rec.symbols[0] = "tcp";
    rec.symbols[1] = pick(rng, {{"ftp", 0.5}, {"ftp_data", 0.5}});
    rec.symbols[2] = "SF";
    set(rec, fi::duration, std::floor(rng.uniform(10.0, 3000.0)));
    set(rec, fi::src_bytes, std::floor(rng.uniform(100.0, 2000.0)));
    set(rec, fi::dst_bytes, std::floor(rng.exponential(400000.0)));
    set(rec, fi::logged_in, 1.0);
    set(rec, fi::hot, 1.0 + static_cast<double>(rng.below(3)));
    set(rec, fi::count, 1.0 + static_cast<double>(rng.below(6)));
    set(rec, fi::srv_count, 1.0 + static_cast<double>(rng.below(6)));
    set(rec, fi::same_srv_rate, rate2(rng.uniform(0.8, 1.0)));
}

void fill_shell_escalation(ConnectionRecord& rec, Rng& rng) {
    rec.symbols[0] = "tcp";
    rec.symbols[1] = pick(rng, {{"telnet", 0.7}, {"ftp", 0.15}, {"other", 0.15}});
    rec.symbols[2] = "SF";
    set(rec, fi::duration, std::floor(rng.uniform(30.0, 300.0)));
    set(rec, fi::src_bytes, std::floor(rng.uniform(200.0, 2000.0)));
    set(rec, fi::dst_bytes, std::floor(rng.uniform(300.0, 4000.0)));
    set(rec, fi::logged_in, 1.0);
    set(rec, fi::hot, 2.0 + static_cast<double>(rng.below(5)));
    set(rec, fi::root_shell, rng.bernoulli(0.7) ? 1.0 : 0.0);
    set(rec, fi::count, 1.0 + static_cast<double>(rng.below(3)));
    set(rec, fi::srv_count, 1.0 + static_cast<double>(rng.below(3)));
    set(rec, fi::same_srv_rate, 1.0);
}

void fill_attack(ConnectionRecord& rec, Rng& rng, const std::string& raw) {
    if (raw == "neptune" || raw == "land") {
        fill_syn_flood(rec, rng);
    } else if (raw == "smurf") {
        fill_smurf(rec, rng);
    } else if (raw == "teardrop" || raw == "pod") {
        fill_fragment_dos(rec, rng, raw);
    } else if (raw == "back") {
        fill_back(rec, rng);
    } else if (raw == "satan" || raw == "portsweep" || raw == "nmap") {
        fill_port_scan(rec, rng);
    } else if (raw == "ipsweep") {
        fill_host_sweep(rec, rng);
    } else if (raw == "guess_passwd" || raw == "imap" || raw == "phf" || raw == "spy") {
        fill_password_guess(rec, rng);
    } else if (raw == "warezclient" || raw == "warezmaster" || raw == "ftp_write" ||
               raw == "multihop") {
        fill_warez(rec, rng);
    } else {
        // buffer_overflow, rootkit, loadmodule, perl and anything unlisted
        fill_shell_escalation(rec, rng);
    }
}

double stealth_probability(const SynthProfile& p, std::string_view family) {
    if (family == "dos") return p.stealth_dos;
    if (family == "probe") return p.stealth_probe;
    if (family == "r2l") return p.stealth_r2l;
    if (family == "u2r") return p.stealth_u2r;
    return 0.0;
}

double border_probability(const SynthProfile& p, std::string_view family) {
    if (family == "dos") return p.border_dos;
    if (family == "probe") return p.border_probe;
    return 0.0;
}

}  // namespace

const std::vector<std::pair<std::string, std::size_t>>& kddtrain_census() { return kCensus; }

Dataset synth_corpus(const SynthSpec& spec) {
    const auto& census = spec.label_counts.empty() ? kCensus : spec.label_counts;
    Rng rng(spec.seed);

    Dataset ds;
    std::size_t total = 0;
    for (const auto& [label, count] : census) total += count;
    ds.records.reserve(total);

    for (const auto& [raw, count] : census) {
        const bool is_normal = raw == "normal";
        const std::string_view family = attack_family(raw);
        const double stealth_p = stealth_probability(spec.profile, family);
        const double border_p = border_probability(spec.profile, family);
        for (std::size_t i = 0; i < count; ++i) {
            ConnectionRecord rec;
            rec.raw_label = raw;
            rec.label = label_from_raw(raw);
            rec.difficulty = static_cast<int>(rng.below(22));
            rec.has_difficulty = true;
            if (is_normal) {
                fill_normal(rec, rng);
                if (rng.bernoulli(spec.profile.bursty_normal)) {
                    if (rng.bernoulli(0.5)) {
                        apply_burst(rec, rng, /*attack_side=*/false);
                    } else {
                        apply_drip(rec, rng, /*attack_side=*/false);
                    }
                }
            } else if (rng.bernoulli(stealth_p)) {
                fill_normal(rec, rng);  // indistinguishable from normal traffic
            } else if (rng.bernoulli(border_p / std::max(1e-12, 1.0 - stealth_p))) {
                fill_normal(rec, rng);
                if (rng.bernoulli(0.5)) {
                    apply_burst(rec, rng, /*attack_side=*/true);
                } else {
                    apply_drip(rec, rng, /*attack_side=*/true);
                }
            } else {
                fill_attack(rec, rng, raw);
            }
            ds.records.push_back(std::move(rec));
        }
    }
    rng.shuffle(ds.records);
    return ds;
}

void write_synth_corpus(const SynthSpec& spec, const std::string& path) {
    const Dataset ds = synth_corpus(spec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write corpus file: " + path);
    write_records(ds, out);
}

}  // namespace netfuse
