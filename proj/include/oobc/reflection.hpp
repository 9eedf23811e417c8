#pragma once

// Transition rules for string constants and the four reflective API calls.
// They are consulted by the generic invoke rule before method resolution.

#include <string_view>

#include "oobc/machine.hpp"

namespace oobc {

inline constexpr std::string_view kForName = "java/lang/Class/forName";
inline constexpr std::string_view kGetMethod = "java/lang/Class/getMethod";
inline constexpr std::string_view kNewInstance = "java/lang/Class/newInstance";
inline constexpr std::string_view kMethodInvoke = "java/lang/reflect/Method/invoke";

// Field names on the modeled heap objects.
inline constexpr std::string_view kStringValueField = "value";
inline constexpr std::string_view kClassNameField = "class-name";
inline constexpr std::string_view kResolvedField = "$resolved";

bool is_reflective_api(std::string_view qualified);

// Handles the statement when it names one of the reflective APIs; false
// otherwise, leaving the caller to do ordinary dispatch.
bool intercept_reflection(const StepContext& cx, const stmt::Invoke& call);

void step_const_string(const StepContext& cx, const stmt::ConstString& s);
void step_forname(const StepContext& cx, const stmt::Invoke& call);
void step_getmethod(const StepContext& cx, const stmt::Invoke& call);
void step_newinstance(const StepContext& cx, const stmt::Invoke& call);
void step_reflect_invoke(const StepContext& cx, const stmt::Invoke& call);

// Class names denoted by a class object's class-name strings, with '.'
// normalized to '/'. Sets `unknown` if any string value is Top.
std::vector<std::string> class_names_of(const Store& store, const ObjectPointer& class_object, bool& unknown);

}  // namespace oobc
