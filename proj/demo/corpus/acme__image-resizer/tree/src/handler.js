const _ = require('lodash');
exports.handler = async (e) => _.pick(e, ['width', 'height']);
