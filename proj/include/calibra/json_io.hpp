#pragma once

#include <nlohmann/json.hpp>

#include "calibra/calibrate.hpp"
#include "calibra/forms.hpp"
#include "calibra/planes.hpp"

namespace calibra {

using json = nlohmann::json;

// Interchange schemas:
//   Form:  {"n":7,"k":3,"terms":[{"idx":[1,2,3],"c":1.0},...]}  (nonzero terms)
//   Plane: {"n":8,"k":4,"basis":[[...],...]}                    (row per vector)
json form_to_json(const Form& f);
Form form_from_json(const json& j);

json plane_to_json(const OrientedPlane& p);
OrientedPlane plane_from_json(const json& j);

json comass_to_json(const ComassReport& r);
json angle_report_to_json(const AngleReport& r);
json plane_class_to_json(const PlaneClass& c);

}  // namespace calibra
