#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "caresim/csv.hpp"
#include "caresim/population.hpp"

// CSV form of a synthesised population: patients.csv, caregivers.csv, dyads.csv.

namespace caresim {

inline constexpr std::array<const char*, 17> kPatientColumns = {
    "id",          "age",       "sex",           "income", "life_expectancy", "home",
    "mobility",    "walking_radius", "aging_stage", "hrs_care_needed", "has_caregiver", "single",
    "has_child",   "education", "divorced",      "worsening_points", "alive"};

inline constexpr std::array<const char*, 20> kCaregiverColumns = {
    "id",        "age",          "sex",       "income",   "life_expectancy", "home",      "mobility",
    "walking_radius", "efforts", "has_job",   "skilled_job", "single",       "has_child", "education",
    "divorced",  "supported",    "hrs_support", "walk_propensity", "dyad_patient", "dyad_index"};

inline constexpr std::array<const char*, 2> kDyadColumns = {"patient", "caregiver"};

namespace detail {

inline const char* sex_code(Sex s) { return s == Sex::female ? "F" : "M"; }

inline Sex parse_sex(const csv::Table& t, const csv::Row& row)
{
    const auto& v = t.cell(row, "sex");
    if (v == "F") {
        return Sex::female;
    }
    if (v == "M") {
        return Sex::male;
    }
    throw Error(ErrorCode::InvalidInput, t.where(row) + ": sex must be M or F");
}

inline Mode parse_mobility(const csv::Table& t, const csv::Row& row)
{
    auto m = parse_mode(t.cell(row, "mobility"));
    if (!m) {
        throw Error(ErrorCode::InvalidInput, t.where(row) + ": unknown mobility '" + t.cell(row, "mobility") + "'");
    }
    return *m;
}

inline void require_header(const csv::Table& t, const auto& columns)
{
    if (t.header() != std::vector<std::string>(columns.begin(), columns.end())) {
        throw Error(ErrorCode::InvalidInput, t.source() + ":1: unexpected header");
    }
}

} // namespace detail

inline void write_patients(std::ostream& os, const std::vector<PatientAgent>& patients)
{
    csv::Writer w(os);
    w.header(kPatientColumns);
    for (const auto& p : patients) {
        w.field(p.id).field(p.age).field(detail::sex_code(p.sex)).field(p.income).field(p.life_expectancy);
        w.field(p.home).field(std::string(mode_name(p.mobility))).field(p.walking_radius).field(p.aging_stage);
        w.field(p.hrs_care_needed).field(p.has_caregiver).field(p.single).field(p.has_child).field(p.education);
        w.field(p.divorced).field(p.worsening_points).field(p.alive);
        w.end_row();
    }
}

inline void write_caregivers(std::ostream& os, const Population& pop)
{
    // dyad_patient / dyad_index: the patient this caregiver is paired with,
    // empty when unpaired.
    std::vector<std::string> partner(pop.caregivers.size());
    std::vector<std::string> dyad_index(pop.caregivers.size());
    std::map<std::int64_t, std::size_t> pos;
    for (std::size_t i = 0; i < pop.caregivers.size(); ++i) {
        pos[pop.caregivers[i].id] = i;
    }
    for (std::size_t d = 0; d < pop.dyads.size(); ++d) {
        if (!pop.dyads[d].caregiver) {
            continue;
        }
        auto it = pos.find(*pop.dyads[d].caregiver);
        if (it != pos.end()) {
            partner[it->second] = std::to_string(pop.dyads[d].patient);
            dyad_index[it->second] = std::to_string(d);
        }
    }
    csv::Writer w(os);
    w.header(kCaregiverColumns);
    for (std::size_t i = 0; i < pop.caregivers.size(); ++i) {
        const auto& c = pop.caregivers[i];
        w.field(c.id).field(c.age).field(detail::sex_code(c.sex)).field(c.income).field(c.life_expectancy);
        w.field(c.home).field(std::string(mode_name(c.mobility))).field(c.walking_radius).field(c.efforts);
        w.field(c.has_job).field(c.skilled_job).field(c.single).field(c.has_child).field(c.education);
        w.field(c.divorced).field(c.supported).field(c.hrs_support).field(c.walk_propensity);
        w.field(partner[i]).field(dyad_index[i]);
        w.end_row();
    }
}

inline void write_dyads(std::ostream& os, const std::vector<Dyad>& dyads)
{
    csv::Writer w(os);
    w.header(kDyadColumns);
    for (const auto& d : dyads) {
        w.field(d.patient);
        if (d.caregiver) {
            w.field(*d.caregiver);
        }
        else {
            w.field(std::string());
        }
        w.end_row();
    }
}

inline std::vector<PatientAgent> read_patients(const csv::Table& t)
{
    detail::require_header(t, kPatientColumns);
    std::vector<PatientAgent> out;
    for (const auto& row : t.rows()) {
        PatientAgent p;
        p.id = t.integer(row, "id");
        p.age = static_cast<int>(t.integer(row, "age"));
        p.sex = detail::parse_sex(t, row);
        p.income = t.number(row, "income");
        p.life_expectancy = static_cast<int>(t.integer(row, "life_expectancy"));
        p.home = t.integer(row, "home");
        p.mobility = detail::parse_mobility(t, row);
        p.walking_radius = static_cast<int>(t.integer(row, "walking_radius"));
        p.aging_stage = static_cast<int>(t.integer(row, "aging_stage"));
        p.hrs_care_needed = t.number(row, "hrs_care_needed");
        p.has_caregiver = t.boolean(row, "has_caregiver");
        p.single = t.boolean(row, "single");
        p.has_child = t.boolean(row, "has_child");
        p.education = t.boolean(row, "education");
        p.divorced = t.boolean(row, "divorced");
        p.worsening_points = t.number(row, "worsening_points");
        p.alive = t.boolean(row, "alive");
        out.push_back(p);
    }
    return out;
}

inline std::vector<CaregiverAgent> read_caregivers(const csv::Table& t)
{
    detail::require_header(t, kCaregiverColumns);
    std::vector<CaregiverAgent> out;
    for (const auto& row : t.rows()) {
        CaregiverAgent c;
        c.id = t.integer(row, "id");
        c.age = static_cast<int>(t.integer(row, "age"));
        c.sex = detail::parse_sex(t, row);
        c.income = t.number(row, "income");
        c.life_expectancy = static_cast<int>(t.integer(row, "life_expectancy"));
        c.home = t.integer(row, "home");
        c.mobility = detail::parse_mobility(t, row);
        c.walking_radius = static_cast<int>(t.integer(row, "walking_radius"));
        c.efforts = t.number(row, "efforts");
        c.has_job = t.boolean(row, "has_job");
        c.skilled_job = t.boolean(row, "skilled_job");
        c.single = t.boolean(row, "single");
        c.has_child = t.boolean(row, "has_child");
        c.education = t.boolean(row, "education");
        c.divorced = t.boolean(row, "divorced");
        c.supported = t.boolean(row, "supported");
        c.hrs_support = t.number(row, "hrs_support");
        c.walk_propensity = t.number(row, "walk_propensity");
        out.push_back(c);
    }
    return out;
}

inline std::vector<Dyad> read_dyads(const csv::Table& t)
{
    detail::require_header(t, kDyadColumns);
    std::vector<Dyad> out;
    for (const auto& row : t.rows()) {
        Dyad d;
        d.patient = t.integer(row, "patient");
        if (!t.cell(row, "caregiver").empty()) {
            d.caregiver = t.integer(row, "caregiver");
        }
        out.push_back(d);
    }
    return out;
}

} // namespace caresim
