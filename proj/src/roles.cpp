#include "mlprov/roles.hpp"

#include <array>
#include <utility>

namespace mlprov {

namespace {

constexpr std::array<std::pair<Role, const char *>, 12> kRoleNames = {{
    {Role::DataSource, "data_source"},
    {Role::Dataframe, "dataframe"},
    {Role::Features, "features"},
    {Role::Labels, "labels"},
    {Role::ValidationFeatures, "validation_features"},
    {Role::ValidationLabels, "validation_labels"},
    {Role::ValidationSet, "validation_set"},
    {Role::Model, "model"},
    {Role::TrainedModel, "trained_model"},
    {Role::Hyperparameter, "hyperparameter"},
    {Role::Metric, "metric"},
    {Role::TrainDataset, "train_dataset"},
}};

} // namespace

const char *role_name(Role r) {
  for (const auto &[role, name] : kRoleNames)
    if (role == r) return name;
  return "unknown";
}

const char *origin_name(Origin o) {
  switch (o) {
    case Origin::Seed: return "seed";
    case Origin::KbForward: return "kb_forward";
    case Origin::KbBackward: return "kb_backward";
  }
  return "seed";
}

std::optional<Role> parse_role(const std::string &name) {
  for (const auto &[role, rname] : kRoleNames)
    if (name == rname) return role;
  return std::nullopt;
}

} // namespace mlprov
