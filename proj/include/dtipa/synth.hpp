#pragma once

#include "dtipa/survey.hpp"

#include <string>

namespace dtipa {

// Deterministic synthetic survey: 107 respondents x 18 attributes on a 1-5
// scale, shaped so that the full pipeline produces a compact optimal tree
// with a dominant "everything high implies overall 5" rule, two quadrant-Q1
// attributes (ticketing and car_crowding), and an improvement plan that
// demotes car_crowding while promoting ticketing (+0.29) and safety (+0.01).
SurveyMatrix synth_survey();
std::string synth_survey_csv();

// Matching pairwise feasibility judgments for the ticketing /
// station_crowding / car_crowding trio; consistent by construction.
std::string synth_judgments_csv();

} // namespace dtipa
