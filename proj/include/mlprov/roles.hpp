#ifndef MLPROV_ROLES_HPP_
#define MLPROV_ROLES_HPP_

#include <optional>
#include <string>

namespace mlprov {

// Closed set of semantic roles a variable can carry. Unknown role names in
// a knowledge-base file are a format error.
enum class Role {
  DataSource,
  Dataframe,
  Features,
  Labels,
  ValidationFeatures,
  ValidationLabels,
  ValidationSet,
  Model,
  TrainedModel,
  Hyperparameter,
  Metric,
  TrainDataset,
};

// How an annotation was obtained.
enum class Origin {
  Seed,
  KbForward,
  KbBackward,
};

const char *role_name(Role r);
const char *origin_name(Origin o);
std::optional<Role> parse_role(const std::string &name);

} // namespace mlprov

#endif // MLPROV_ROLES_HPP_
