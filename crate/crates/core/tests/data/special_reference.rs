// Generated by special_reference.py; do not edit.
const LOG_K_REF: &[(f64, f64, f64)] = &[
    (0.0, 1e-06, 2.6341483053069884094),
    (0.0, 0.01, 1.552072478848215843),
    (0.0, 0.5, -0.078589769869081416895),
    (0.0, 1.9, -2.0491375470578920302),
    (0.0, 2.1, -2.2947782370499974205),
    (0.0, 5.0, -5.6018312137170631795),
    (0.0, 30.0, -31.478906854243695315),
    (0.0, 500.0, -502.88176244708558344),
    (0.0, 10000.0, -10004.379391332718429),
    (0.3, 1e-06, 4.7550084143166223856),
    (0.3, 0.01, 1.9300859816189330927),
    (0.3, 0.5, -0.02380702734543257338),
    (0.3, 1.9, -2.0296657660207179297),
    (0.3, 2.1, -2.276897166774938189),
    (0.3, 5.0, -5.5935829670318899895),
    (0.3, 30.0, -31.477431008272061829),
    (0.3, 500.0, -502.88167253689389468),
    (0.3, 10000.0, -10004.379386832943405),
    (0.5, 1e-06, 7.133545631626864507),
    (0.5, 0.01, 2.5183764456387731058),
    (0.5, 0.5, 0.072364942924700087072),
    (0.5, 1.9, -1.9951355904414698434),
    (0.5, 2.1, -2.2451773197199613338),
    (0.5, 5.0, -5.5789276035723227549),
    (0.5, 30.0, -31.474807338186350255),
    (0.5, 500.0, -502.88151269656636844),
    (0.5, 10000.0, -10004.379378833343364),
    (1.0, 1e-06, 13.815510557957058428),
    (1.0, 0.01, 4.6049090930892691511),
    (1.0, 0.5, 0.50467139730465117731),
    (1.0, 1.9, -1.8347077662739776039),
    (1.0, 2.1, -2.0976347466777363231),
    (1.0, 5.0, -5.5103692965852233155),
    (1.0, 30.0, -31.462509841343925037),
    (1.0, 500.0, -502.88076344525723162),
    (1.0, 10000.0, -10004.3793413352182),
    (1.7, 1e-06, 23.87576327752380411),
    (1.7, 0.01, 8.2181489702941429635),
    (1.7, 0.5, 1.4915900467181740902),
    (1.7, 1.9, -1.4401514578643917282),
    (1.7, 2.1, -1.7336615710665613455),
    (1.7, 5.0, -5.3385971518006226075),
    (1.7, 30.0, -31.431527137584756581),
    (1.7, 500.0, -502.87887533361147652),
    (1.7, 10000.0, -10004.379246839942994),
    (2.5, 1e-06, 35.86318003622335583),
    (2.5, 0.01, 12.837312439891966674),
    (2.5, 0.5, 3.0168039220911405471),
    (2.5, 1.9, -0.76843142258989720868),
    (2.5, 2.1, -1.1109265156044929742),
    (2.5, 5.0, -5.0366033127469610807),
    (2.5, 30.0, -31.376471437465488414),
    (2.5, 500.0, -502.87551869653054066),
    (2.5, 10000.0, -10004.379078848343364),
    (7.2, 1e-06, 110.72603661670273736),
    (7.2, 0.01, 44.411581906217758728),
    (7.2, 0.5, 16.234949394233605486),
    (7.2, 1.9, 6.4893982289335544937),
    (7.2, 2.1, 5.7374729213343713444),
    (7.2, 5.0, -1.265026359694009185),
    (7.2, 30.0, -30.632524713701237413),
    (7.2, 500.0, -502.82997506552308949),
    (7.2, 10000.0, -10004.376799462416332),
    (20.0, 1e-06, 328.81989177712392474),
    (20.0, 0.01, 144.61308302181085627),
    (20.0, 0.5, 66.369335055848886154),
    (20.0, 1.9, 39.625165335788223606),
    (20.0, 2.1, 37.613000513899415299),
    (20.0, 5.0, 19.994906008486834148),
    (20.0, 30.0, -25.121054727823669037),
    (20.0, 500.0, -502.4822145731247163),
    (20.0, 10000.0, -10004.359392339274772),
    (49.5, 1e-06, 860.10269369753489535),
    (49.5, 0.01, 404.19084476924993707),
    (49.5, 0.5, 210.54441787370662644),
    (49.5, 1.9, 144.44454910831822156),
    (49.5, 2.1, 139.48629599128304552),
    (49.5, 5.0, 96.439052595548695987),
    (49.5, 30.0, 3.4375686230942408085),
    (49.5, 500.0, -500.43594092659177089),
    (49.5, 10000.0, -10004.256885207758275),
    (60.0, 1e-06, 1054.3601459923427085),
    (60.0, 0.01, 501.73972325004293258),
    (60.0, 0.5, 267.01728403572266476),
    (60.0, 1.9, 186.90298475037482536),
    (60.0, 2.1, 180.89458839892952699),
    (60.0, 5.0, 128.75740206438645934),
    (60.0, 30.0, 17.659535116643995976),
    (60.0, 500.0, -499.28963060060801333),
    (60.0, 10000.0, -10004.199400871575805),
    (150.0, 1e-06, 2775.6149841534003999),
    (150.0, 0.01, 1394.0639281891877465),
    (150.0, 0.5, 807.26005808025824829),
    (150.0, 1.9, 607.0042606098587266),
    (150.0, 2.1, 591.99039960544764739),
    (150.0, 5.0, 461.83077322689151724),
    (150.0, 30.0, 191.60632630181817257),
    (150.0, 500.0, -480.5676318119790011),
    (150.0, 10000.0, -10003.25446866262662),
    (9999.0, 1e-06, 227161.88283639851185),
    (9999.0, 0.01, 135067.68945700615951),
    (9999.0, 0.5, 95951.371419481377528),
    (9999.0, 1.9, 82602.695669207906526),
    (9999.0, 2.1, 81601.961147092636654),
    (9999.0, 5.0, 72927.822455760159521),
    (9999.0, 30.0, 55011.997643598272999),
    (9999.0, 500.0, 26874.477093805208396),
    (9999.0, 10000.0, -5333.8337338692786472),
];
const LOG_I0_REF: &[(f64, f64)] = &[
    (0.0, 0.0),
    (1e-05, 2.499999999984375409e-11),
    (0.5, 0.061549719185481303941),
    (3.0, 1.5853076218134209155),
    (10.0, 7.9429720831186955545),
    (29.9, 27.28638531055509432),
    (30.1, 27.483023208951183233),
    (100.0, 96.779732689942583717),
    (10000.0, 9994.475903781432301),
];
