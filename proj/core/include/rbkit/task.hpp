#pragma once

#include <string>

namespace rbkit {

enum class Task { Regression, Binary, Multiclass };

const char* to_string(Task task);
Task task_from_string(const std::string& name);

}  // namespace rbkit
