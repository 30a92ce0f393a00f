#pragma once

#include <json.hpp>

#include "linemom/crb.hpp"
#include "linemom/kramers_kronig.hpp"
#include "linemom/moments.hpp"
#include "linemom/monte_carlo.hpp"
#include "linemom/profile.hpp"

namespace linemom {

using Json = nlohmann::ordered_json;

Json to_json(const Grid& g);
Json to_json(const MomentVector& m);
Json to_json(const ConversionMatrix& c);
Json to_json(const CrbReport& report);
Json to_json(const McReport& report);
Json to_json(const KkError& err);

}  // namespace linemom
