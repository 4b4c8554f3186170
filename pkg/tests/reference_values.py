"""Published reference values used by the acceptance and regression tests.

Floats are kept as strings so their printed precision is preserved.
"""

# (n, a, false-rejection rate, decision limit)
LIMITS = [
    (1, 1, "0.127240", "1.525077"),
    (1, 2, "0.034726", "2.111536"),
    (1, 3, "0.027421", "2.205468"),
    (1, 4, "0.023750", "2.261149"),
    (1, 6, "0.012258", "2.504643"),
    (1, 8, "0.008197", "2.643835"),
    (1, 12, "0.005178", "2.795778"),
    (1, 16, "0.004186", "2.863775"),
    (2, 1, "0.114545", "1.888090"),
    (2, 2, "0.046078", "2.268308"),
    (2, 3, "0.031890", "2.407227"),
    (2, 4, "0.008733", "2.849716"),
    (2, 6, "0.016204", "2.646416"),
    (2, 8, "0.009049", "2.838333"),
    (2, 12, "0.003311", "3.145682"),
    (2, 16, "0.002574", "3.218706"),
    (3, 1, "0.120814", "2.033406"),
    (3, 2, "0.041528", "2.456272"),
    (3, 3, "0.024233", "2.646056"),
    (3, 4, "0.007836", "3.009274"),
    (3, 6, "0.009234", "2.958895"),
    (3, 8, "0.005146", "3.135029"),
    (3, 12, "0.005211", "3.131339"),
    (3, 16, "0.002915", "3.298332"),
    (4, 1, "0.101483", "2.220312"),
    (4, 2, "0.040159", "2.56916"),
    (4, 3, "0.029011", "2.681327"),
    (4, 4, "0.004909", "3.231921"),
    (4, 6, "0.010381", "3.010814"),
    (4, 8, "0.005599", "3.194108"),
    (4, 12, "0.003848", "3.301041"),
]

# critical error rows, shift mu_c = 2.67, sigma = 1:
# (n, k, a, p_fr, l, p_n, p_s, delta_p, delta_p_rel)
SYSTEMATIC = [
    (2, 2, 1, "0.114545", "1.888090", "0.970429", "0.952854", "0.017575", "0.018444"),
    (2, 2, 2, "0.046078", "2.268308", "0.932883", "0.881695", "0.051188", "0.058056"),
    (2, 2, 3, "0.031890", "2.407227", "0.904121", "0.842897", "0.061224", "0.072635"),
    (2, 2, 4, "0.022235", "2.537022", "0.867865", "0.800097", "0.067768", "0.084700"),
    (2, 2, 6, "0.016204", "2.646416", "0.849032", "0.759319", "0.089713", "0.118149"),
    (2, 2, 8, "0.007229", "2.909426", "0.785067", "0.646436", "0.138631", "0.214454"),
    (2, 2, 12, "0.003311", "3.145682", "0.686446", "0.533716", "0.152730", "0.286163"),
    (2, 2, 16, "0.002574", "3.218706", "0.656111", "0.498175", "0.157936", "0.317030"),
    (3, 2, 1, "0.120814", "2.033406", "0.957183", "0.934143", "0.023040", "0.024664"),
    (3, 2, 2, "0.041528", "2.456273", "0.886290", "0.829882", "0.056408", "0.067971"),
    (3, 2, 3, "0.024233", "2.646056", "0.845290", "0.761419", "0.083871", "0.110151"),
    (3, 2, 4, "0.014565", "2.814931", "0.794489", "0.690580", "0.103910", "0.150467"),
    (3, 2, 6, "0.009234", "2.958895", "0.733737", "0.624573", "0.109164", "0.174782"),
    (3, 2, 8, "0.005146", "3.135030", "0.675917", "0.539690", "0.136226", "0.252416"),
    (3, 2, 12, "0.005211", "3.131339", "0.666497", "0.541492", "0.125005", "0.230854"),
    (3, 2, 16, "0.002915", "3.298332", "0.600938", "0.460144", "0.140794", "0.305979"),
    (3, 3, 1, "0.120814", "2.033406", "0.994133", "0.981975", "0.012158", "0.012381"),
    (3, 3, 2, "0.041528", "2.456273", "0.977577", "0.928330", "0.049247", "0.053049"),
    (3, 3, 3, "0.024233", "2.646056", "0.964508", "0.882028", "0.082480", "0.093512"),
    (3, 3, 4, "0.014565", "2.814931", "0.950179", "0.826616", "0.123563", "0.149481"),
    (3, 3, 6, "0.009234", "2.958895", "0.922430", "0.768898", "0.153532", "0.199677"),
    (3, 3, 8, "0.005146", "3.135030", "0.896336", "0.686891", "0.209445", "0.304917"),
    (3, 3, 12, "0.005211", "3.131339", "0.887244", "0.688717", "0.198527", "0.288256"),
    (3, 3, 16, "0.002915", "3.298332", "0.850374", "0.602762", "0.247612", "0.410796"),
    (4, 2, 1, "0.101483", "2.220312", "0.933884", "0.898972", "0.034912", "0.038836"),
    (4, 2, 2, "0.040159", "2.569160", "0.854466", "0.792838", "0.061629", "0.077732"),
    (4, 2, 3, "0.029011", "2.681327", "0.828322", "0.749180", "0.079142", "0.105638"),
    (4, 2, 4, "0.014786", "2.901210", "0.756794", "0.652813", "0.103981", "0.159281"),
    (4, 2, 6, "0.010381", "3.010815", "0.713196", "0.600919", "0.112276", "0.186841"),
    (4, 2, 8, "0.005599", "3.194108", "0.642783", "0.511516", "0.131267", "0.256624"),
    (4, 2, 12, "0.003848", "3.301042", "0.599206", "0.459357", "0.139849", "0.304446"),
    (4, 2, 16, "0.004080", "3.284519", "0.588973", "0.467366", "0.121607", "0.260196"),
    (4, 3, 1, "0.101483", "2.220312", "0.990978", "0.966123", "0.024854", "0.025726"),
    (4, 3, 2, "0.040159", "2.569160", "0.968567", "0.903758", "0.064810", "0.071711"),
    (4, 3, 3, "0.029011", "2.681327", "0.963287", "0.872522", "0.090765", "0.104026"),
    (4, 3, 4, "0.014786", "2.901210", "0.936527", "0.793899", "0.142628", "0.179655"),
    (4, 3, 6, "0.010381", "3.010815", "0.910047", "0.746571", "0.163476", "0.218969"),
    (4, 3, 8, "0.005599", "3.194108", "0.881661", "0.657630", "0.224031", "0.340664"),
    (4, 3, 12, "0.003848", "3.301042", "0.852930", "0.601707", "0.251223", "0.417518"),
    (4, 3, 16, "0.004080", "3.284519", "0.843337", "0.610479", "0.232858", "0.381435"),
    (4, 4, 1, "0.101483", "2.220312", "0.999255", "0.988641", "0.010614", "0.010736"),
    (4, 4, 2, "0.040159", "2.569160", "0.995497", "0.955288", "0.040209", "0.042091"),
    (4, 4, 3, "0.029011", "2.681327", "0.994943", "0.935210", "0.059733", "0.063871"),
    (4, 4, 4, "0.014786", "2.901210", "0.988630", "0.877652", "0.110978", "0.126449"),
    (4, 4, 6, "0.010381", "3.010815", "0.979138", "0.839064", "0.140074", "0.166940"),
    (4, 4, 8, "0.005599", "3.194108", "0.973312", "0.760039", "0.213273", "0.280607"),
    (4, 4, 12, "0.003848", "3.301042", "0.963679", "0.706576", "0.257103", "0.363871"),
    (4, 4, 16, "0.004080", "3.284519", "0.957798", "0.715139", "0.017575", "0.339318"),
]

# critical error rows, mu = 0, sigma_c = 3.33:
# (n, k, a, p_fr, l, p_n, p_s, delta_p, delta_p_rel)
RANDOM = [
    (2, 2, 1, "0.114545", "1.888090", "0.820710", "0.815717", "0.004993", "0.006121"),
    (2, 2, 2, "0.046078", "2.268308", "0.753781", "0.745744", "0.008038", "0.010778"),
    (2, 2, 3, "0.031890", "2.407227", "0.728892", "0.718832", "0.010061", "0.013996"),
    (2, 2, 4, "0.022235", "2.537022", "0.702068", "0.693237", "0.008831", "0.012739"),
    (2, 2, 6, "0.016204", "2.646416", "0.685062", "0.671415", "0.013647", "0.020325"),
    (2, 2, 8, "0.007229", "2.909426", "0.637138", "0.618423", "0.018715", "0.030262"),
    (2, 2, 12, "0.003311", "3.145682", "0.593274", "0.570763", "0.022511", "0.039441"),
    (2, 2, 16, "0.002574", "3.218706", "0.575099", "0.556117", "0.018982", "0.034133"),
    (3, 2, 1, "0.120814", "2.033406", "0.804366", "0.798559", "0.005807", "0.007272"),
    (3, 2, 2, "0.041528", "2.456273", "0.722860", "0.713287", "0.009573", "0.013420"),
    (3, 2, 3, "0.024233", "2.646056", "0.683709", "0.674162", "0.009546", "0.014160"),
    (3, 2, 4, "0.014565", "2.814931", "0.651198", "0.639280", "0.011919", "0.018644"),
    (3, 2, 6, "0.009234", "2.958895", "0.622393", "0.609635", "0.012758", "0.020927"),
    (3, 2, 8, "0.005146", "3.135030", "0.587840", "0.573638", "0.014202", "0.024758"),
    (3, 2, 12, "0.005211", "3.131339", "0.588805", "0.574388", "0.014417", "0.025100"),
    (3, 2, 16, "0.002915", "3.298332", "0.557886", "0.540675", "0.017211", "0.031832"),
    (3, 3, 1, "0.120814", "2.033406", "0.909988", "0.903577", "0.006410", "0.007095"),
    (3, 3, 2, "0.041528", "2.456273", "0.857034", "0.843187", "0.013847", "0.016422"),
    (3, 3, 3, "0.024233", "2.646056", "0.829792", "0.811709", "0.018083", "0.022278"),
    (3, 3, 4, "0.014565", "2.814931", "0.805116", "0.781756", "0.023360", "0.029881"),
    (3, 3, 6, "0.009234", "2.958895", "0.780677", "0.754969", "0.025708", "0.034052"),
    (3, 3, 8, "0.005146", "3.135030", "0.751832", "0.720882", "0.030951", "0.042934"),
    (3, 3, 12, "0.005211", "3.131339", "0.750725", "0.721609", "0.029117", "0.040349"),
    (3, 3, 16, "0.002915", "3.298332", "0.724862", "0.688244", "0.036618", "0.053205"),
    (4, 2, 1, "0.101483", "2.220312", "0.772341", "0.767670", "0.004671", "0.006085"),
    (4, 2, 2, "0.040159", "2.569160", "0.701798", "0.693199", "0.008599", "0.012404"),
    (4, 2, 3, "0.029011", "2.681327", "0.677069", "0.669318", "0.007751", "0.011581"),
    (4, 2, 4, "0.014786", "2.901210", "0.632607", "0.622903", "0.009705", "0.015580"),
    (4, 2, 6, "0.010381", "3.010815", "0.610869", "0.600031", "0.010838", "0.018062"),
    (4, 2, 8, "0.005599", "3.194108", "0.574481", "0.562274", "0.012207", "0.021710"),
    (4, 2, 12, "0.003848", "3.301042", "0.555940", "0.540575", "0.015365", "0.028424"),
    (4, 2, 16, "0.004080", "3.284519", "0.552367", "0.543910", "0.008457", "0.015548"),
    (4, 3, 1, "0.101483", "2.220312", "0.890943", "0.881861", "0.009083", "0.010299"),
    (4, 3, 2, "0.040159", "2.569160", "0.842058", "0.826546", "0.015513", "0.018768"),
    (4, 3, 3, "0.029011", "2.681327", "0.825227", "0.807022", "0.018205", "0.022558"),
    (4, 3, 4, "0.014786", "2.901210", "0.790938", "0.766700", "0.024238", "0.031614"),
    (4, 3, 6, "0.010381", "3.010815", "0.772276", "0.745724", "0.026553", "0.035607"),
    (4, 3, 8, "0.005599", "3.194108", "0.740107", "0.709583", "0.030524", "0.043017"),
    (4, 3, 12, "0.003848", "3.301042", "0.724164", "0.687997", "0.036167", "0.052569"),
    (4, 3, 16, "0.004080", "3.284519", "0.719965", "0.691352", "0.028612", "0.041386"),
    (4, 4, 1, "0.101483", "2.220312", "0.949559", "0.939926", "0.009632", "0.010248"),
    (4, 4, 2, "0.040159", "2.569160", "0.917611", "0.901935", "0.015676", "0.017381"),
    (4, 4, 3, "0.029011", "2.681327", "0.907597", "0.887382", "0.020215", "0.022780"),
    (4, 4, 4, "0.014786", "2.901210", "0.882921", "0.855663", "0.027258", "0.031856"),
    (4, 4, 6, "0.010381", "3.010815", "0.870035", "0.838346", "0.031689", "0.037799"),
    (4, 4, 8, "0.005599", "3.194108", "0.847989", "0.807317", "0.040672", "0.050379"),
    (4, 4, 12, "0.003848", "3.301042", "0.834971", "0.788113", "0.046858", "0.059456"),
    (4, 4, 16, "0.004080", "3.284519", "0.830135", "0.791130", "0.039005", "0.049303"),
]
