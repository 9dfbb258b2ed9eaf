#include "mrr/state.hpp"

#include <stdexcept>

namespace mrr {

ModelBounds ModelBounds::make(int server_count, std::uint32_t max_term,
                              std::uint32_t max_log_len, std::uint32_t max_config_version) {
    ModelBounds b;
    b.servers.reserve(server_count);
    for (int i = 0; i < server_count; ++i) {
        b.servers.push_back("n" + std::to_string(i + 1));
    }
    b.max_term = max_term;
    b.max_log_len = max_log_len;
    b.max_config_version = max_config_version;
    b.validate();
    return b;
}

void ModelBounds::validate() const {
    if (servers.empty()) throw std::invalid_argument("bounds: need at least one server");
    if (servers.size() > 16) throw std::invalid_argument("bounds: at most 16 servers supported");
    if (max_term < 1) throw std::invalid_argument("bounds: maxTerm must be >= 1");
    if (max_config_version < 1) throw std::invalid_argument("bounds: maxConfigVersion must be >= 1");
    for (size_t i = 0; i < servers.size(); ++i) {
        if (servers[i].empty()) throw std::invalid_argument("bounds: empty server name");
        for (size_t j = i + 1; j < servers.size(); ++j) {
            if (servers[i] == servers[j]) {
                throw std::invalid_argument("bounds: duplicate server name '" + servers[i] + "'");
            }
        }
    }
}

ReplicaSetState initial_state(const ModelBounds& bounds, MemberSet initial_config) {
    bounds.validate();
    if (!initial_config.subset_of(bounds.universe())) {
        throw std::invalid_argument("initial config outside the server universe");
    }
    const MemberSet members = initial_config.empty() ? bounds.universe() : initial_config;
    ReplicaSetState st;
    st.servers.resize(bounds.server_count());
    for (auto& s : st.servers) {
        s.log.clear();
        s.term = 0;
        s.role = Role::Secondary;
        s.config = members;
        s.config_version = 1;
        s.config_term = 0;
    }
    return st;
}

bool type_ok(const ReplicaSetState& st, const ModelBounds& bounds) {
    if (st.server_count() != bounds.server_count()) return false;
    const MemberSet universe = bounds.universe();
    for (const auto& s : st.servers) {
        if (s.log.size() > bounds.max_log_len) return false;
        for (std::uint32_t e : s.log) {
            if (e > bounds.max_term) return false;
        }
        if (s.term > bounds.max_term) return false;
        if (!s.config.subset_of(universe)) return false;
        if (s.config_version > bounds.max_config_version) return false;
        if (s.config_term > bounds.max_term) return false;
    }
    for (size_t i = 0; i < st.committed.size(); ++i) {
        const auto& c = st.committed[i];
        if (c.index > bounds.max_log_len || c.term > bounds.max_term) return false;
        if (i > 0 && !(st.committed[i - 1] < c)) return false;  // sorted, unique
    }
    return true;
}

}  // namespace mrr
