#include "holonet/network.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <tuple>
#include <sstream>

#include "holonet/errors.hpp"

namespace holonet
{

namespace
{

std::string describe_edge(const EdgeDescription& edge)
{
    std::ostringstream out;
    out << edge.target << " <- ";
    if (edge.source)
        out << *edge.source;
    else
        out << "bias";
    return out.str();
}

} // namespace

std::string NetworkSpec::weight_label(Eigen::Index weight) const
{
    const auto& link = links_[weight];
    std::ostringstream out;
    out << "w_" << labels_[link.target] << '_';
    if (link.is_bias())
        out << 'b';
    else
        out << labels_[link.source];
    return out.str();
}

NetworkSpec build_network(const NetworkDescription& description)
{
    const int omega = description.input_count;
    if (omega < 0)
        throw ConfigError("input count must be non-negative");

    const int nu = omega + static_cast<int>(description.neurons.size());
    if (nu == 0)
        throw ConfigError("network has no neurons");

    // id -> activation for non-input neurons
    std::vector<std::optional<Activation>> activation_of(static_cast<std::size_t>(nu) + 1);
    for (const auto& neuron : description.neurons)
    {
        if (neuron.id <= omega || neuron.id > nu)
            throw ConfigError("neuron id " + std::to_string(neuron.id) + " out of range " +
                              std::to_string(omega + 1) + ".." + std::to_string(nu));
        if (activation_of[neuron.id])
            throw ConfigError("neuron id " + std::to_string(neuron.id) + " listed twice");
        activation_of[neuron.id] = neuron.activation;
    }

    std::vector<int> output_rank(static_cast<std::size_t>(nu) + 1, -1);
    for (std::size_t r = 0; r < description.outputs.size(); ++r)
    {
        const int id = description.outputs[r];
        if (id < 1 || id > nu)
            throw ConfigError("output index " + std::to_string(id) + " out of range 1.." + std::to_string(nu));
        if (id <= omega)
            throw ConfigError("output index " + std::to_string(id) + " refers to an input neuron");
        if (output_rank[id] >= 0)
            throw ConfigError("output index " + std::to_string(id) + " listed twice");
        output_rank[id] = static_cast<int>(r);
    }

    std::vector<std::vector<int>> successors(static_cast<std::size_t>(nu) + 1);
    std::vector<int> in_degree(static_cast<std::size_t>(nu) + 1, 0);
    std::set<std::pair<int, int>> seen;
    for (const auto& edge : description.edges)
    {
        if (edge.target < 1 || edge.target > nu || (edge.source && (*edge.source < 1 || *edge.source > nu)))
            throw ConfigError("dangling edge " + describe_edge(edge));
        if (edge.target <= omega)
            throw ConfigError("edge " + describe_edge(edge) + " targets an input neuron");
        const int source = edge.source.value_or(0);
        if (!seen.emplace(edge.target, source).second)
            throw ConfigError("duplicate edge " + describe_edge(edge));
        if (edge.source)
        {
            successors[*edge.source].push_back(edge.target);
            ++in_degree[edge.target];
        }
    }

    // Kahn's algorithm. Ready neurons are taken inputs first, then hidden by id,
    // then outputs in supervision order, so outputs land last whenever possible.
    using Key = std::tuple<int, int, int>; // (class, rank, id)
    auto key_of = [&](int id) -> Key {
        if (id <= omega)
            return {0, id, id};
        if (output_rank[id] >= 0)
            return {2, output_rank[id], id};
        return {1, id, id};
    };
    std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
    for (int id = 1; id <= nu; ++id)
        if (in_degree[id] == 0)
            ready.push(key_of(id));

    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(nu));
    while (!ready.empty())
    {
        const int id = std::get<2>(ready.top());
        ready.pop();
        order.push_back(id);
        for (const int next : successors[id])
            if (--in_degree[next] == 0)
                ready.push(key_of(next));
    }
    if (static_cast<int>(order.size()) != nu)
    {
        for (int id = 1; id <= nu; ++id)
            if (in_degree[id] > 0)
                throw ConfigError("cycle detected through neuron " + std::to_string(id));
    }

    const auto eta = static_cast<int>(description.outputs.size());
    for (int p = 0; p < nu - eta; ++p)
        if (output_rank[order[p]] >= 0)
            throw ConfigError("output neuron " + std::to_string(order[p]) + " feeds a non-output neuron");

    NetworkSpec net;
    net.input_count_ = omega;
    net.description_ = description;
    net.labels_ = order;

    std::vector<Eigen::Index> position_of(static_cast<std::size_t>(nu) + 1);
    for (int p = 0; p < nu; ++p)
        position_of[order[p]] = p;

    net.activations_.resize(static_cast<std::size_t>(nu), Activation::identity);
    for (int p = omega; p < nu; ++p)
        net.activations_[p] = activation_of[order[p]].value_or(Activation::identity);

    for (const auto& edge : description.edges)
    {
        net.links_.push_back({position_of[edge.target],
                              edge.source ? position_of[*edge.source] : WeightLink::bias});
    }

    net.incoming_offsets_.assign(static_cast<std::size_t>(nu) + 1, 0);
    for (const auto& link : net.links_)
        ++net.incoming_offsets_[link.target + 1];
    for (int p = 0; p < nu; ++p)
        net.incoming_offsets_[p + 1] += net.incoming_offsets_[p];
    net.incoming_.resize(net.links_.size());
    auto fill = net.incoming_offsets_;
    for (std::size_t e = 0; e < net.links_.size(); ++e)
        net.incoming_[fill[net.links_[e].target]++] = static_cast<Eigen::Index>(e);

    net.outputs_.resize(static_cast<std::size_t>(eta));
    for (int r = 0; r < eta; ++r)
        net.outputs_[r] = position_of[description.outputs[r]];

    return net;
}

NetworkDescription random_description(std::mt19937_64& rng, const RandomNetworkOptions& options)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

    const int nu = draw(2, std::max(2, options.max_neurons));
    const int omega = draw(1, std::min(options.max_inputs, nu - 1));
    const int eta = draw(1, std::min(options.max_outputs, nu - omega));

    NetworkDescription desc;
    desc.input_count = omega;
    for (int id = omega + 1; id <= nu; ++id)
    {
        desc.neurons.push_back(
            {id, unit(rng) < options.tanh_probability ? Activation::tanh : Activation::identity});
        bool connected = false;
        for (int source = 1; source < id; ++source)
        {
            if (unit(rng) < options.edge_probability)
            {
                desc.edges.push_back({id, source});
                connected = true;
            }
        }
        if (!connected)
            desc.edges.push_back({id, draw(1, id - 1)});
        if (unit(rng) < options.bias_probability)
            desc.edges.push_back({id, std::nullopt});
    }
    for (int id = nu - eta + 1; id <= nu; ++id)
        desc.outputs.push_back(id);
    return desc;
}

} // namespace holonet
