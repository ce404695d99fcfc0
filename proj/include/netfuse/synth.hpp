#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "netfuse/dataset.hpp"

namespace netfuse {

// Difficulty knobs for the generated corpus. Stealth attacks draw their whole
// record from the normal-traffic profile. Border records (attack or normal)
// share one "retransmission burst" overlay on top of the normal profile, with
// only a mild intensity shift between the classes, so detectors are forced
// into boundary errors there while the packet symbols stay normal-typical.
struct SynthProfile {
    double stealth_dos = 0.15;
    double stealth_probe = 0.15;
    double stealth_r2l = 0.80;
    double stealth_u2r = 0.75;
    double border_dos = 0.04;
    double border_probe = 0.04;
    double bursty_normal = 0.03;
};

struct SynthSpec {
    std::uint64_t seed = 20180417;
    // per raw label record counts; empty means the published KDDTrain+ census
    std::vector<std::pair<std::string, std::size_t>> label_counts;
    SynthProfile profile;
};

// label -> count inventory of the public KDDTrain+ file
// (125973 records: 67343 normal, 58630 attack)
const std::vector<std::pair<std::string, std::size_t>>& kddtrain_census();

// Deterministic stand-in corpus with NSL-KDD shape: 41 features, the three
// categorical columns with realistic vocabularies, a difficulty field, and
// class-conditional feature distributions that overlap enough to keep
// detection imperfect.
Dataset synth_corpus(const SynthSpec& spec);

void write_synth_corpus(const SynthSpec& spec, const std::string& path);

}  // namespace netfuse
