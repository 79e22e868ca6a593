#pragma once

#include "breachsim/cards.hpp"
#include "breachsim/orchestrator.hpp"

#include <json.hpp>

#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace breachsim {

enum class TableFormat { Markdown, Csv };

// Win rate as tenths of a percent, rounded half-up: 18/30 -> 600 -> "60.0".
inline int win_rate_tenths(int wins, int runs) {
    if (runs <= 0) throw std::invalid_argument("win_rate_tenths: runs must be positive");
    return static_cast<int>((static_cast<long long>(wins) * 1000 + runs / 2) / runs);
}

inline std::string format_tenths(int tenths) {
    std::string sign = tenths < 0 ? "-" : "";
    const int v = std::abs(tenths);
    return sign + std::to_string(v / 10) + "." + std::to_string(v % 10);
}

inline std::string format_delta(int delta_tenths) {
    return "(" + std::string(delta_tenths < 0 ? "" : "+") + format_tenths(delta_tenths) + ")";
}

namespace detail {

inline std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

} // namespace detail

struct TrajectoryRow {
    int turn = 0;
    std::string procedure_name;
    int roll = 0;
    std::string modifier; // "+0" / "+3"
    bool success = false;
    std::string revealed; // display name or "-"
    bool retrieval = false;
};

inline TrajectoryRow trajectory_row(const Catalog& catalog, const TurnRecord& rec) {
    TrajectoryRow row;
    row.turn = rec.turn;
    row.procedure_name = catalog.at(rec.procedure_id).name;
    row.roll = rec.natural_roll;
    row.modifier = "+" + std::to_string(rec.modifier);
    row.success = rec.success;
    row.revealed = rec.revealed_card ? catalog.at(*rec.revealed_card).name : "-";
    row.retrieval = rec.retrieval;
    return row;
}

// Turn | Procedure | Roll | Modifier | Success | Revealed Incident | Retrieval
inline std::string render_trajectory(const Catalog& catalog,
                                     const std::vector<TurnRecord>& records,
                                     TableFormat format) {
    std::ostringstream out;
    if (format == TableFormat::Markdown) {
        out << "| Turn | Procedure | Roll | Modifier | Success | Revealed Incident | "
               "Retrieval |\n";
        out << "| --- | --- | --- | --- | --- | --- | --- |\n";
        for (const TurnRecord& rec : records) {
            const TrajectoryRow row = trajectory_row(catalog, rec);
            out << "| " << row.turn << " | " << row.procedure_name << " | " << row.roll
                << " | " << row.modifier << " | " << (row.success ? "Yes" : "No") << " | "
                << row.revealed << " | " << (row.retrieval ? "Yes" : "No") << " |\n";
        }
    } else {
        out << "Turn,Procedure,Roll,Modifier,Success,Revealed Incident,Retrieval\n";
        for (const TurnRecord& rec : records) {
            const TrajectoryRow row = trajectory_row(catalog, rec);
            out << row.turn << "," << detail::csv_quote(row.procedure_name) << "," << row.roll
                << "," << row.modifier << "," << (row.success ? "Yes" : "No") << ","
                << detail::csv_quote(row.revealed) << "," << (row.retrieval ? "Yes" : "No")
                << "\n";
        }
    }
    return out.str();
}

// Parses render_trajectory(..., Csv) output back into rows.
inline std::vector<TrajectoryRow> parse_trajectory_csv(const std::string& text) {
    std::vector<std::vector<std::string>> lines;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            fields.push_back(std::move(field));
            field.clear();
            if (!fields.empty() && !(fields.size() == 1 && fields[0].empty())) {
                lines.push_back(std::move(fields));
            }
            fields.clear();
        } else {
            field.push_back(c);
        }
    }
    if (!field.empty() || !fields.empty()) {
        fields.push_back(std::move(field));
        lines.push_back(std::move(fields));
    }

    std::vector<TrajectoryRow> rows;
    for (size_t i = 1; i < lines.size(); ++i) { // skip header
        const auto& f = lines[i];
        if (f.size() != 7) throw ParseError("trajectory csv: expected 7 fields per row");
        TrajectoryRow row;
        row.turn = std::stoi(f[0]);
        row.procedure_name = f[1];
        row.roll = std::stoi(f[2]);
        row.modifier = f[3];
        row.success = f[4] == "Yes";
        row.revealed = f[5];
        row.retrieval = f[6] == "Yes";
        rows.push_back(std::move(row));
    }
    return rows;
}

// --- transcript persistence --------------------------------------------------

inline nlohmann::json message_to_json(const Message& m) {
    return {{"type", "message"},
            {"speaker", m.speaker},
            {"turn", m.turn},
            {"kind", message_kind_key(m.kind)},
            {"text", m.text},
            {"ts", m.timestamp}};
}

inline void write_transcript(std::ostream& out, const GameReport& report) {
    for (const Message& m : report.transcript) {
        out << message_to_json(m).dump() << "\n";
    }
    nlohmann::json summary = {{"type", "summary"},
                              {"seed", report.seed},
                              {"structure", structure_key(report.structure)},
                              {"status", status_label(report.status)},
                              {"turns", report.turns_played},
                              {"retrievals", report.retrieval_count},
                              {"config_digest", report.config_digest},
                              {"aborted", report.aborted}};
    if (report.aborted) summary["abort_reason"] = report.abort_reason;
    out << summary.dump() << "\n";
}

} // namespace breachsim
