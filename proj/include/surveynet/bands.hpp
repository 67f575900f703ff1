#pragma once

#include <surveynet/model.hpp>

namespace surveynet {

/// The unique band whose inclusive interval contains `score`; OutOfRange otherwise.
const Band& band_of(const BandTable& table, const Rational& score);

} // namespace surveynet
