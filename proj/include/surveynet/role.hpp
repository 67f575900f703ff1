#pragma once

#include <string_view>

namespace surveynet {

enum class Role { SuperAdmin, Interviewer, Respondent };

std::string_view to_string(Role role);
Role role_from_string(std::string_view text);

} // namespace surveynet
