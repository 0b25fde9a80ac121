#pragma once

// Deterministic CSV output: fixed column order, shortest round-trip decimal
// for every double, '\n' line endings.

#include <charconv>
#include <cmath>
#include <complex>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rcp/errors.hpp"
#include "rcp/fluid_sim.hpp"
#include "rcp/linear_stability.hpp"
#include "rcp/packet_sim.hpp"

namespace rcp::io {

/// Shortest decimal that parses back to exactly `v`.
[[nodiscard]] inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw InternalError("format_double: to_chars failed");
    return std::string(buf, ptr);
}

class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size()) {
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << '\n';
    }

    CsvWriter& cell(double v) { return raw(format_double(v)); }
    CsvWriter& cell(std::string_view s) { return raw(std::string(s)); }
    CsvWriter& cell(const char* s) { return raw(std::string(s)); }

    void end_row() {
        if (in_row_ != columns_) throw InternalError("CsvWriter: row has wrong column count");
        out_ << '\n';
        in_row_ = 0;
    }

private:
    CsvWriter& raw(const std::string& s) {
        out_ << (in_row_ ? "," : "") << s;
        ++in_row_;
        return *this;
    }

    std::ostream& out_;
    std::size_t columns_;
    std::size_t in_row_ = 0;
};

inline void write_trajectory(std::ostream& out, const Trajectory& tr) {
    CsvWriter w(out, {"t", "R", "q"});
    for (std::size_t i = 0; i < tr.size(); ++i) {
        w.cell(tr.times[i]).cell(tr.R_values[i]).cell(tr.q_values[i]).end_row();
    }
}

inline void write_phase_portrait(std::ostream& out, const std::vector<std::pair<double, double>>& pts) {
    CsvWriter w(out, {"R", "R_delayed"});
    for (const auto& [r, rd] : pts) w.cell(r).cell(rd).end_row();
}

inline void write_spectrum(std::ostream& out, const Spectrum& s) {
    CsvWriter w(out, {"re", "im", "residual"});
    for (std::size_t i = 0; i < s.roots.size(); ++i) {
        w.cell(s.roots[i].real()).cell(s.roots[i].imag()).cell(s.residuals[i]).end_row();
    }
}

inline void write_packet_trace(std::ostream& out, const PacketTrace& tr) {
    CsvWriter w(out, {"t", "queue", "rate", "utilization"});
    for (std::size_t i = 0; i < tr.size(); ++i) {
        w.cell(tr.times[i]).cell(tr.queue_lengths[i]).cell(tr.fair_rates[i]).cell(tr.utilization[i]).end_row();
    }
}

}  // namespace rcp::io
