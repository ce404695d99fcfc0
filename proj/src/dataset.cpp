#include "netfuse/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

namespace netfuse {

namespace {

constexpr FeatureKind C = FeatureKind::continuous;
constexpr FeatureKind S = FeatureKind::symbolic;
constexpr FeatureKind B = FeatureKind::binary;

const std::array<FeatureDescriptor, kFeatureCount> kSchema = {{
    {0, "duration", C},
    {1, "protocol_type", S},
    {2, "service", S},
    {3, "flag", S},
    {4, "src_bytes", C},
    {5, "dst_bytes", C},
    {6, "land", B},
    {7, "wrong_fragment", C},
    {8, "urgent", C},
    {9, "hot", C},
    {10, "num_failed_logins", C},
    {11, "logged_in", B},
    {12, "num_compromised", C},
    {13, "root_shell", C},
    {14, "su_attempted", C},
    {15, "num_root", C},
    {16, "num_file_creations", C},
    {17, "num_shells", C},
    {18, "num_access_files", C},
    {19, "num_outbound_cmds", C},
    {20, "is_host_login", B},
    {21, "is_guest_login", B},
    {22, "count", C},
    {23, "srv_count", C},
    {24, "serror_rate", C},
    {25, "srv_serror_rate", C},
    {26, "rerror_rate", C},
    {27, "srv_rerror_rate", C},
    {28, "same_srv_rate", C},
    {29, "diff_srv_rate", C},
    {30, "srv_diff_host_rate", C},
    {31, "dst_host_count", C},
    {32, "dst_host_srv_count", C},
    {33, "dst_host_same_srv_rate", C},
    {34, "dst_host_diff_srv_rate", C},
    {35, "dst_host_same_src_port_rate", C},
    {36, "dst_host_srv_diff_host_rate", C},
    {37, "dst_host_serror_rate", C},
    {38, "dst_host_srv_serror_rate", C},
    {39, "dst_host_rerror_rate", C},
    {40, "dst_host_srv_rerror_rate", C},
}};

// published NSL-KDD attack inventory grouped into the four families
const std::unordered_map<std::string_view, std::string_view>& family_table() {
    static const std::unordered_map<std::string_view, std::string_view> table = {
        // dos
        {"back", "dos"}, {"land", "dos"}, {"neptune", "dos"}, {"pod", "dos"},
        {"smurf", "dos"}, {"teardrop", "dos"}, {"apache2", "dos"}, {"udpstorm", "dos"},
        {"processtable", "dos"}, {"mailbomb", "dos"}, {"worm", "dos"},
        // probe
        {"satan", "probe"}, {"ipsweep", "probe"}, {"nmap", "probe"},
        {"portsweep", "probe"}, {"mscan", "probe"}, {"saint", "probe"},
        // r2l
        {"guess_passwd", "r2l"}, {"ftp_write", "r2l"}, {"imap", "r2l"},
        {"phf", "r2l"}, {"multihop", "r2l"}, {"warezmaster", "r2l"},
        {"warezclient", "r2l"}, {"spy", "r2l"}, {"xlock", "r2l"},
        {"xsnoop", "r2l"}, {"snmpguess", "r2l"}, {"snmpgetattack", "r2l"},
        {"httptunnel", "r2l"}, {"sendmail", "r2l"}, {"named", "r2l"},
        // u2r
        {"buffer_overflow", "u2r"}, {"loadmodule", "u2r"}, {"rootkit", "u2r"},
        {"perl", "u2r"}, {"sqlattack", "u2r"}, {"xterm", "u2r"}, {"ps", "u2r"},
    };
    return table;
}

bool valid_symbol(std::string_view token) {
    if (token.empty()) return false;
    for (char c : token) {
        const unsigned char u = static_cast<unsigned char>(c);
        if (!(std::isalnum(u) || c == '_' || c == '-' || c == '.')) return false;
    }
    return true;
}

double parse_number(std::string_view token, std::size_t line, std::size_t column,
                    std::string_view field_name) {
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ParseError("non-numeric value '" + std::string(token) + "' for feature " +
                             std::string(field_name),
                         line, column);
    }
    return value;
}

void append_number(std::string& out, double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    out.append(buf, ptr);
}

}  // namespace

const std::array<FeatureDescriptor, kFeatureCount>& kdd_schema() { return kSchema; }

int symbolic_slot(int feature_index) {
    switch (feature_index) {
        case 1: return 0;
        case 2: return 1;
        case 3: return 2;
        default: return -1;
    }
}

int feature_index(std::string_view name) {
    for (const auto& d : kSchema) {
        if (d.name == name) return d.index;
    }
    return -1;
}

std::string_view label_name(ClassLabel label) {
    return label == ClassLabel::normal ? "normal" : "attack";
}

ClassLabel label_from_raw(std::string_view raw_label) {
    return raw_label == "normal" ? ClassLabel::normal : ClassLabel::attack;
}

std::string_view attack_family(std::string_view raw_label) {
    if (raw_label == "normal") return "normal";
    const auto& table = family_table();
    const auto it = table.find(raw_label);
    return it != table.end() ? it->second : "other";
}

const std::string& ConnectionRecord::symbol(int feature_index) const {
    const int slot = symbolic_slot(feature_index);
    if (slot < 0) throw std::out_of_range("feature is not symbolic");
    return symbols[static_cast<std::size_t>(slot)];
}

std::string& ConnectionRecord::symbol(int feature_index) {
    const int slot = symbolic_slot(feature_index);
    if (slot < 0) throw std::out_of_range("feature is not symbolic");
    return symbols[static_cast<std::size_t>(slot)];
}

ClassCounts class_counts(const Dataset& ds) {
    ClassCounts counts;
    for (const auto& rec : ds.records) {
        if (rec.label == ClassLabel::normal) {
            ++counts.normal;
        } else {
            ++counts.attack;
        }
    }
    return counts;
}

ParseError::ParseError(std::string message, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", field " + std::to_string(column) +
                         ": " + std::move(message)),
      line_(line),
      column_(column) {}

ConnectionRecord parse_line(std::string_view line, std::size_t line_number) {
    // split on commas; fields are column-numbered from 1
    std::array<std::string_view, kFeatureCount + 2> fields;
    std::size_t field_count = 0;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        const std::string_view token =
            comma == std::string_view::npos ? line.substr(start) : line.substr(start, comma - start);
        if (field_count >= fields.size()) {
            throw ParseError("expected 42 or 43 fields, got more", line_number, field_count + 1);
        }
        fields[field_count++] = token;
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (field_count != kFeatureCount + 1 && field_count != kFeatureCount + 2) {
        throw ParseError("expected 42 or 43 fields, got " + std::to_string(field_count),
                         line_number, field_count);
    }

    ConnectionRecord rec;
    for (int i = 0; i < kFeatureCount; ++i) {
        const std::string_view token = fields[static_cast<std::size_t>(i)];
        const std::size_t column = static_cast<std::size_t>(i) + 1;
        const FeatureDescriptor& desc = kSchema[static_cast<std::size_t>(i)];
        switch (desc.kind) {
            case FeatureKind::symbolic:
                if (!valid_symbol(token)) {
                    throw ParseError("invalid symbol '" + std::string(token) + "' for feature " +
                                         std::string(desc.name),
                                     line_number, column);
                }
                rec.symbols[static_cast<std::size_t>(symbolic_slot(i))] = std::string(token);
                break;
            case FeatureKind::binary: {
                const double v = parse_number(token, line_number, column, desc.name);
                if (v != 0.0 && v != 1.0) {
                    throw ParseError("binary feature " + std::string(desc.name) +
                                         " outside {0,1}: '" + std::string(token) + "'",
                                     line_number, column);
                }
                rec.numeric[static_cast<std::size_t>(i)] = v;
                break;
            }
            case FeatureKind::continuous:
                rec.numeric[static_cast<std::size_t>(i)] =
                    parse_number(token, line_number, column, desc.name);
                break;
        }
    }

    const std::string_view label_token = fields[kFeatureCount];
    if (!valid_symbol(label_token)) {
        throw ParseError("invalid class label '" + std::string(label_token) + "'", line_number,
                         kFeatureCount + 1);
    }
    rec.raw_label = std::string(label_token);
    rec.label = label_from_raw(label_token);

    if (field_count == kFeatureCount + 2) {
        const std::string_view diff_token = fields[kFeatureCount + 1];
        const double v = parse_number(diff_token, line_number, kFeatureCount + 2, "difficulty");
        if (v < 0.0 || v != static_cast<double>(static_cast<int>(v))) {
            throw ParseError("difficulty must be a non-negative integer, got '" +
                                 std::string(diff_token) + "'",
                             line_number, kFeatureCount + 2);
        }
        rec.difficulty = static_cast<int>(v);
        rec.has_difficulty = true;
    }
    return rec;
}

ParseResult parse_records(std::istream& in, bool strict) {
    ParseResult result;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++result.lines;
        try {
            result.dataset.records.push_back(parse_line(line, line_number));
        } catch (const ParseError&) {
            if (strict) throw;
            ++result.skipped;
        }
    }
    return result;
}

ParseResult parse_file(const std::string& path, bool strict) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    return parse_records(in, strict);
}

std::string format_record(const ConnectionRecord& rec) {
    std::string out;
    out.reserve(256);
    for (int i = 0; i < kFeatureCount; ++i) {
        if (i > 0) out.push_back(',');
        const int slot = symbolic_slot(i);
        if (slot >= 0) {
            out += rec.symbols[static_cast<std::size_t>(slot)];
        } else {
            append_number(out, rec.numeric[static_cast<std::size_t>(i)]);
        }
    }
    out.push_back(',');
    out += rec.raw_label;
    if (rec.has_difficulty) {
        out.push_back(',');
        out += std::to_string(rec.difficulty);
    }
    return out;
}

void write_records(const Dataset& ds, std::ostream& out) {
    for (const auto& rec : ds.records) {
        out << format_record(rec) << '\n';
    }
}

}  // namespace netfuse
