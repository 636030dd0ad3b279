#pragma once

#include <string>
#include <string_view>

// IRIs shared by every module that writes to or reads from the information
// service. Kept in one place so exporters and writers cannot drift apart.
namespace gridscope::vocab {

inline constexpr std::string_view kType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kNs = "urn:gridscope:";

// Resource metadata.
inline constexpr std::string_view kTelescope = "urn:gridscope:Telescope";
inline constexpr std::string_view kComputeResource = "urn:gridscope:ComputeResource";
inline constexpr std::string_view kName = "urn:gridscope:name";
inline constexpr std::string_view kLatitude = "urn:gridscope:latitude";
inline constexpr std::string_view kLongitude = "urn:gridscope:longitude";
inline constexpr std::string_view kElevation = "urn:gridscope:elevation";
inline constexpr std::string_view kAperture = "urn:gridscope:aperture";
inline constexpr std::string_view kFilter = "urn:gridscope:filter";
inline constexpr std::string_view kMinAltitude = "urn:gridscope:minAltitude";
inline constexpr std::string_view kStatus = "urn:gridscope:status";
inline constexpr std::string_view kContact = "urn:gridscope:contact";
inline constexpr std::string_view kLrm = "urn:gridscope:lrm";
inline constexpr std::string_view kSlots = "urn:gridscope:slots";

// Activity state: jobs.
inline constexpr std::string_view kOwner = "urn:gridscope:owner";
inline constexpr std::string_view kExecutable = "urn:gridscope:executable";
inline constexpr std::string_view kState = "urn:gridscope:state";
inline constexpr std::string_view kSubmitted = "urn:gridscope:submitted";
inline constexpr std::string_view kStarted = "urn:gridscope:started";
inline constexpr std::string_view kEnded = "urn:gridscope:ended";
inline constexpr std::string_view kResource = "urn:gridscope:resource";
inline constexpr std::string_view kTransition = "urn:gridscope:transition";

// Activity state: observations (usage records).
inline constexpr std::string_view kUser = "urn:gridscope:user";
inline constexpr std::string_view kTelescopeName = "urn:gridscope:telescopeName";
inline constexpr std::string_view kLocation = "urn:gridscope:location";
inline constexpr std::string_view kStart = "urn:gridscope:start";
inline constexpr std::string_view kEnd = "urn:gridscope:end";
inline constexpr std::string_view kPriority = "urn:gridscope:priority";

// Application metadata: observation requests.
inline constexpr std::string_view kTargetName = "urn:gridscope:targetName";
inline constexpr std::string_view kRightAscension = "urn:gridscope:rightAscension";
inline constexpr std::string_view kDeclination = "urn:gridscope:declination";
inline constexpr std::string_view kRequestedFilter = "urn:gridscope:requestedFilter";

inline std::string resource_context(std::string_view id) {
  return "urn:resource:" + std::string(id);
}
inline std::string job_iri(std::string_view id) { return "urn:job:" + std::string(id); }
inline std::string job_audit_context(std::string_view id) {
  return "urn:audit:" + std::string(id);
}
inline std::string request_context(std::string_view id) {
  return "urn:request:" + std::string(id);
}

}  // namespace gridscope::vocab
