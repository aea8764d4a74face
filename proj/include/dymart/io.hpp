#pragma once

// CSV and binary serialization. CSV files carry a comment line with the
// generating seed/depth, then a header row; numbers are written with 17
// significant digits and LF line endings. The binary process layout is:
// uint32 depth, uint32 slice count, then row-major little-endian doubles
// (slice by slice, atom by atom).

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "dymart/martingale.hpp"
#include "dymart/space.hpp"

namespace dymart {

inline std::string format_real(double x) {
    if (x == 0.0) x = 0.0;  // normalize -0
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline void write_values_csv(std::ostream& os, const RandomVariable& f) {
    os << "index,value\n";
    for (std::size_t m = 0; m < f.size(); ++m) {
        os << m << ',' << format_real(f[m]) << '\n';
    }
}

inline void write_spectrum_csv(std::ostream& os, const WalshSpectrum& s) {
    os << "index,value\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        os << i << ',' << format_real(s.at_index(i)) << '\n';
    }
}

inline void write_process_csv(std::ostream& os, const AdaptedProcess& y) {
    os << "time_index,atom_index,value\n";
    for (int l = 0; l <= y.steps(); ++l) {
        const RandomVariable& slice = y.slice(l);
        for (std::size_t m = 0; m < slice.size(); ++m) {
            os << l << ',' << m << ',' << format_real(slice[m]) << '\n';
        }
    }
}

inline void write_process_bin(std::ostream& os, const AdaptedProcess& y) {
    const std::uint32_t depth = static_cast<std::uint32_t>(y.space().depth());
    const std::uint32_t slices = depth + 1;
    os.write(reinterpret_cast<const char*>(&depth), sizeof(depth));
    os.write(reinterpret_cast<const char*>(&slices), sizeof(slices));
    for (int l = 0; l <= y.steps(); ++l) {
        const auto vals = y.slice(l).values();
        os.write(reinterpret_cast<const char*>(vals.data()),
                 static_cast<std::streamsize>(vals.size() * sizeof(double)));
    }
}

// Raw slices, before any adaptedness/martingale validation; callers decide
// which process type to construct.
inline std::vector<std::vector<double>> read_process_slices_bin(std::istream& is, int& depth_out) {
    std::uint32_t depth = 0, slices = 0;
    is.read(reinterpret_cast<char*>(&depth), sizeof(depth));
    is.read(reinterpret_cast<char*>(&slices), sizeof(slices));
    if (!is || depth < 1 || depth > 63 || slices != depth + 1) {
        throw std::invalid_argument("read_process_slices_bin: bad header");
    }
    const std::size_t size = std::size_t{1} << depth;
    std::vector<std::vector<double>> out(slices, std::vector<double>(size));
    for (auto& slice : out) {
        is.read(reinterpret_cast<char*>(slice.data()),
                static_cast<std::streamsize>(size * sizeof(double)));
        if (!is) throw std::invalid_argument("read_process_slices_bin: truncated payload");
    }
    depth_out = static_cast<int>(depth);
    return out;
}

inline AdaptedProcess read_process_bin(std::istream& is) {
    int depth = 0;
    std::vector<std::vector<double>> raw = read_process_slices_bin(is, depth);
    const DyadicSpace space(depth);
    std::vector<RandomVariable> slices;
    slices.reserve(raw.size());
    for (auto& values : raw) {
        slices.push_back(RandomVariable(space, std::move(values)));
    }
    return AdaptedProcess(space, std::move(slices));
}

}  // namespace dymart
