#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace netfuse {

enum class FeatureKind { continuous, symbolic, binary };

struct FeatureDescriptor {
    int index;
    std::string_view name;
    FeatureKind kind;
};

inline constexpr int kFeatureCount = 41;
inline constexpr int kSymbolicCount = 3;  // protocol_type, service, flag

// canonical NSL-KDD feature order: duration, protocol_type, service, flag,
// src_bytes, dst_bytes, ... (41 features, symbolic at indices 1, 2, 3)
const std::array<FeatureDescriptor, kFeatureCount>& kdd_schema();

// slot among the symbolic features (0..2) for feature index 1/2/3, else -1
int symbolic_slot(int feature_index);

// feature index by canonical name, -1 if unknown
int feature_index(std::string_view name);

enum class ClassLabel : int { normal = 0, attack = 1 };

std::string_view label_name(ClassLabel label);

// "normal" maps to normal; every other raw label is an attack
ClassLabel label_from_raw(std::string_view raw_label);

// NSL-KDD attack family for a raw label: "dos", "probe", "r2l", "u2r",
// "normal", or "other" for attack names outside the published inventory
std::string_view attack_family(std::string_view raw_label);

// One parsed NSL-KDD row. Numeric slots at symbolic feature indices are
// unused and kept at zero; symbols hold protocol_type/service/flag.
struct ConnectionRecord {
    std::array<double, kFeatureCount> numeric{};
    std::array<std::string, kSymbolicCount> symbols;
    ClassLabel label = ClassLabel::normal;
    std::string raw_label;
    int difficulty = 0;
    bool has_difficulty = false;

    const std::string& symbol(int feature_index) const;
    std::string& symbol(int feature_index);

    bool operator==(const ConnectionRecord&) const = default;
};

// Immutable after construction; record order is stable so seeded sampling
// is deterministic.
struct Dataset {
    std::vector<ConnectionRecord> records;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
    static const std::array<FeatureDescriptor, kFeatureCount>& schema() { return kdd_schema(); }

    bool operator==(const Dataset&) const = default;
};

struct ClassCounts {
    std::size_t normal = 0;
    std::size_t attack = 0;
};

ClassCounts class_counts(const Dataset& ds);

class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t line, std::size_t column);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

struct ParseResult {
    Dataset dataset;
    std::size_t lines = 0;    // non-empty input lines
    std::size_t skipped = 0;  // malformed lines dropped in lenient mode
};

// One record per comma-separated line: 41 features + label, with an optional
// trailing difficulty field. strict=true throws ParseError on the first
// malformed line; lenient mode skips and counts it.
ParseResult parse_records(std::istream& in, bool strict = true);
ParseResult parse_file(const std::string& path, bool strict = true);

ConnectionRecord parse_line(std::string_view line, std::size_t line_number = 1);

// canonical line format; re-parsing the output reproduces the dataset exactly
std::string format_record(const ConnectionRecord& rec);
void write_records(const Dataset& ds, std::ostream& out);

}  // namespace netfuse
